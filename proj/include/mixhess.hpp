#pragma once

#include "mixhess/errors.hpp"
#include "mixhess/random.hpp"
#include "mixhess/symmetric_functions.hpp"
#include "mixhess/sym_tensor.hpp"
#include "mixhess/spectral.hpp"
#include "mixhess/hessian_operator.hpp"
#include "mixhess/chi.hpp"
#include "mixhess/chi_validation.hpp"
#include "mixhess/grid.hpp"
#include "mixhess/grid_io.hpp"
#include "mixhess/expression.hpp"
#include "mixhess/krylov.hpp"
#include "mixhess/continuation.hpp"
#include "mixhess/mms.hpp"
#include "mixhess/sampling.hpp"
#include "mixhess/properties.hpp"
#include "mixhess/config.hpp"
#include "mixhess/driver.hpp"
