#pragma once

// Convenience umbrella for the whole library.

#include "ermetrics/cluster.hpp"
#include "ermetrics/core.hpp"
#include "ermetrics/errors.hpp"
#include "ermetrics/gmd.hpp"
#include "ermetrics/info.hpp"
#include "ermetrics/io.hpp"
#include "ermetrics/pairwise.hpp"
#include "ermetrics/rank.hpp"
#include "ermetrics/report.hpp"
#include "ermetrics/synth.hpp"
