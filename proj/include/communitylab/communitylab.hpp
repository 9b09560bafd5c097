#pragma once

#include "communitylab/budget.hpp"
#include "communitylab/community.hpp"
#include "communitylab/community_graph.hpp"
#include "communitylab/counting_reduction.hpp"
#include "communitylab/decision_reduction.hpp"
#include "communitylab/detector.hpp"
#include "communitylab/error.hpp"
#include "communitylab/field_poly.hpp"
#include "communitylab/generators.hpp"
#include "communitylab/graph_io.hpp"
#include "communitylab/label_cover.hpp"
#include "communitylab/label_cover_io.hpp"
#include "communitylab/partition.hpp"
#include "communitylab/rational.hpp"
#include "communitylab/rng.hpp"
