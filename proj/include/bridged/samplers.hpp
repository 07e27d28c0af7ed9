#pragma once

#include "bridged/samplers/adaptation.hpp"
#include "bridged/samplers/bmmc.hpp"
#include "bridged/samplers/cox_canonical.hpp"
#include "bridged/samplers/discrete_gibbs.hpp"
#include "bridged/samplers/gibbs_hinge.hpp"
#include "bridged/samplers/gibbs_latent_normal.hpp"
#include "bridged/samplers/harmonization.hpp"
#include "bridged/samplers/mala.hpp"
#include "bridged/samplers/rw_metropolis.hpp"
#include "bridged/samplers/trace.hpp"
