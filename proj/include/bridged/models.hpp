#pragma once

#include "bridged/models/bmmc.hpp"
#include "bridged/models/concepts.hpp"
#include "bridged/models/cox.hpp"
#include "bridged/models/flow.hpp"
#include "bridged/models/harmonization.hpp"
#include "bridged/models/io.hpp"
#include "bridged/models/lqe.hpp"
#include "bridged/models/oracles.hpp"
#include "bridged/models/param.hpp"
#include "bridged/models/propriety.hpp"
