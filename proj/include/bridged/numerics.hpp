#pragma once

#include "bridged/numerics/kernels.hpp"
#include "bridged/numerics/linalg.hpp"
#include "bridged/numerics/polya_gamma.hpp"
#include "bridged/numerics/spd.hpp"
