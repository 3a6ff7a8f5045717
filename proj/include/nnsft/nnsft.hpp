#pragma once

#include "nnsft/error.hpp"
#include "nnsft/lattice.hpp"
#include "nnsft/sft.hpp"
#include "nnsft/admissibility.hpp"
#include "nnsft/repair.hpp"
#include "nnsft/potentials.hpp"
#include "nnsft/harness.hpp"
#include "nnsft/entropy.hpp"
