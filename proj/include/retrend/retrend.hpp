#pragma once

// Umbrella header for the retrend library. The HTTP entity source lives in
// wikidata_http.hpp and is not pulled in here, so library users without a
// network backend never compile the HTTP stack.

#include "retrend/cache.hpp"
#include "retrend/config.hpp"
#include "retrend/distributions.hpp"
#include "retrend/encoding.hpp"
#include "retrend/errors.hpp"
#include "retrend/granger.hpp"
#include "retrend/graph.hpp"
#include "retrend/linking.hpp"
#include "retrend/month.hpp"
#include "retrend/ols.hpp"
#include "retrend/pipeline.hpp"
#include "retrend/rdd.hpp"
#include "retrend/rng.hpp"
#include "retrend/scenario.hpp"
#include "retrend/series.hpp"
#include "retrend/similarity.hpp"
#include "retrend/synth.hpp"
#include "retrend/trends.hpp"
