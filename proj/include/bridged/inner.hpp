#pragma once

#include "bridged/inner/cox_hazard.hpp"
#include "bridged/inner/laplacian_admm.hpp"
#include "bridged/inner/lqe_dual.hpp"
#include "bridged/inner/max_flow.hpp"
#include "bridged/inner/solution.hpp"
#include "bridged/inner/svm_dual.hpp"
