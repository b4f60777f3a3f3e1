#pragma once

#include "wplab/errors.hpp"
#include "wplab/stats.hpp"
#include "wplab/parallel.hpp"
#include "wplab/curve.hpp"
#include "wplab/scenarios.hpp"
#include "wplab/portfolio.hpp"
#include "wplab/alm.hpp"
#include "wplab/valuation.hpp"
#include "wplab/bound.hpp"
#include "wplab/io.hpp"
#include "wplab/report.hpp"
