#pragma once

#include "geoguard/analysis.hpp"
#include "geoguard/attacks.hpp"
#include "geoguard/detector.hpp"
#include "geoguard/errors.hpp"
#include "geoguard/geometry.hpp"
#include "geoguard/io.hpp"
#include "geoguard/measurement.hpp"
#include "geoguard/montecarlo.hpp"
#include "geoguard/noise_model.hpp"
#include "geoguard/point.hpp"
#include "geoguard/rng.hpp"
#include "geoguard/scenario.hpp"
