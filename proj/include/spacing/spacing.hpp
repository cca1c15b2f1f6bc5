#pragma once

// Umbrella header for the whole library.

#include "spacing/alldifferent.hpp"
#include "spacing/bench.hpp"
#include "spacing/bipartite.hpp"
#include "spacing/bounded.hpp"
#include "spacing/cnf.hpp"
#include "spacing/core.hpp"
#include "spacing/intervoice.hpp"
#include "spacing/propagation.hpp"
#include "spacing/reductions.hpp"
#include "spacing/rhythm.hpp"
#include "spacing/search.hpp"
#include "spacing/semantics.hpp"
#include "spacing/spacing1.hpp"
#include "spacing/spacing_sb.hpp"
#include "spacing/verify.hpp"
