#pragma once

#include "hftsvr/benchmark.hpp"
#include "hftsvr/config.hpp"
#include "hftsvr/data.hpp"
#include "hftsvr/error.hpp"
#include "hftsvr/fuzzy.hpp"
#include "hftsvr/grid_search.hpp"
#include "hftsvr/hierarchy.hpp"
#include "hftsvr/metrics.hpp"
#include "hftsvr/qp.hpp"
#include "hftsvr/regressor.hpp"
#include "hftsvr/serialize.hpp"
#include "hftsvr/tsvr.hpp"
