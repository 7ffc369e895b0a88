#pragma once

#include "config.hpp"
#include "descriptor.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "factorization.hpp"
#include "fft.hpp"
#include "identification.hpp"
#include "io.hpp"
#include "laguerre.hpp"
#include "operator_model.hpp"
#include "quadrature.hpp"
#include "signal.hpp"
#include "transforms.hpp"
