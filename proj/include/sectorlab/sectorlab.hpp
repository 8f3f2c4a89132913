#pragma once

#include "sectorlab/bounds.hpp"
#include "sectorlab/config.hpp"
#include "sectorlab/degree_set.hpp"
#include "sectorlab/errors.hpp"
#include "sectorlab/geometry.hpp"
#include "sectorlab/harness.hpp"
#include "sectorlab/model.hpp"
#include "sectorlab/random.hpp"
#include "sectorlab/theory.hpp"
