#pragma once

#include "quaternion.hpp"
#include "qmatrix.hpp"
#include "spectral.hpp"
#include "metric.hpp"
#include "dynamics.hpp"
#include "json_io.hpp"
