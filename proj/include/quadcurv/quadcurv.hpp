#pragma once

#include "quadcurv/conditions.hpp"
#include "quadcurv/embedding.hpp"
#include "quadcurv/experiments.hpp"
#include "quadcurv/io.hpp"
#include "quadcurv/iteration.hpp"
#include "quadcurv/metric_space.hpp"
#include "quadcurv/model_geometry.hpp"
#include "quadcurv/rng.hpp"
