#pragma once

// Monte Carlo simulation of spontaneous wave-function collapse in
// finite-dimensional Hilbert spaces: the discrete Gaussian-sharpening process,
// its Brownian-driven continuous limit, reduced one- and two-detector
// beam-splitter models, deterministic parallel ensembles and the statistics
// used to compare them.

#include "collapse/continuous.hpp"
#include "collapse/detector.hpp"
#include "collapse/ensemble.hpp"
#include "collapse/errors.hpp"
#include "collapse/experiment_config.hpp"
#include "collapse/hitting.hpp"
#include "collapse/output.hpp"
#include "collapse/rng.hpp"
#include "collapse/state.hpp"
#include "collapse/stats.hpp"
#include "collapse/svg_plot.hpp"
