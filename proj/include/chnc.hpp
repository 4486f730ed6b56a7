#pragma once

#include "chnc/chnc.hpp"
#include "chnc/commands.hpp"
#include "chnc/confidence.hpp"
#include "chnc/dataset.hpp"
#include "chnc/dimacs.hpp"
#include "chnc/error.hpp"
#include "chnc/eval.hpp"
#include "chnc/folds.hpp"
#include "chnc/forest.hpp"
#include "chnc/hnc_graphs.hpp"
#include "chnc/json_io.hpp"
#include "chnc/maxflow.hpp"
#include "chnc/paramcut.hpp"
#include "chnc/pipeline.hpp"
#include "chnc/random.hpp"
#include "chnc/simgraph.hpp"
