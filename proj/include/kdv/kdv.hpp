#pragma once

#include "kdv/baselines.hpp"
#include "kdv/config_file.hpp"
#include "kdv/experiments.hpp"
#include "kdv/grid.hpp"
#include "kdv/initial.hpp"
#include "kdv/integrator.hpp"
#include "kdv/model.hpp"
#include "kdv/projection.hpp"
#include "kdv/rng.hpp"
#include "kdv/spectral.hpp"
#include "kdv/tableau.hpp"
