#pragma once

// Grid dumps. Text layout: one header line
//   n k count_1..count_n lower_1..lower_n upper_1..upper_n
// followed by one value per line in row-major (lexicographic) order.

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "mixhess/errors.hpp"
#include "mixhess/grid.hpp"

namespace mixhess {

inline void write_text_dump(std::ostream& os, const GridFunction& f, int k) {
  const Box& box = f.box();
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << box.dim() << ' ' << k;
  for (int c : box.counts()) os << ' ' << c;
  for (double v : box.lower()) os << ' ' << v;
  for (double v : box.upper()) os << ' ' << v;
  os << '\n';
  for (double v : f.values()) os << v << '\n';
  os.precision(old_precision);
}

struct GridDump {
  int k = 0;
  GridFunction function;
};

inline GridDump read_text_dump(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw SpecError("grid dump: missing header");
  std::istringstream hs(header);
  std::size_t n = 0;
  int k = 0;
  if (!(hs >> n >> k) || n < 1) throw SpecError("grid dump: malformed header");
  std::vector<int> counts(n);
  std::vector<double> lower(n), upper(n);
  for (auto& c : counts) hs >> c;
  for (auto& v : lower) hs >> v;
  for (auto& v : upper) hs >> v;
  if (!hs) throw SpecError("grid dump: malformed header");
  Box box(lower, upper, counts);
  std::vector<double> values(box.size());
  for (auto& v : values) {
    if (!(is >> v)) throw SpecError("grid dump: too few values");
  }
  return {k, GridFunction(std::move(box), std::move(values))};
}

inline nlohmann::ordered_json to_json(const GridFunction& f, int k) {
  nlohmann::ordered_json j;
  j["n"] = f.box().dim();
  j["k"] = k;
  j["counts"] = f.box().counts();
  j["lower"] = f.box().lower();
  j["upper"] = f.box().upper();
  j["values"] = std::vector<double>(f.values().begin(), f.values().end());
  return j;
}

inline GridDump grid_from_json(const nlohmann::json& j) {
  try {
    Box box(j.at("lower").get<std::vector<double>>(), j.at("upper").get<std::vector<double>>(),
            j.at("counts").get<std::vector<int>>());
    return {j.at("k").get<int>(), GridFunction(std::move(box), j.at("values").get<std::vector<double>>())};
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("grid json: ") + e.what());
  }
}

}  // namespace mixhess
