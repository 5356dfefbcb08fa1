#pragma once

#include "lrroc/error.hpp"
#include "lrroc/data_model.hpp"
#include "lrroc/bernstein.hpp"
#include "lrroc/constrained_logit.hpp"
#include "lrroc/roc.hpp"
#include "lrroc/bp_estimator.hpp"
#include "lrroc/baselines.hpp"
#include "lrroc/simulation.hpp"
#include "lrroc/io.hpp"
