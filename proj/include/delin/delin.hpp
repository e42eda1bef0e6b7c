#pragma once

#include "delin/attention.hpp"
#include "delin/bench.hpp"
#include "delin/classifier.hpp"
#include "delin/error.hpp"
#include "delin/graph.hpp"
#include "delin/graph_io.hpp"
#include "delin/instance_gen.hpp"
#include "delin/loops.hpp"
#include "delin/manifest.hpp"
#include "delin/mip_model.hpp"
#include "delin/mstp.hpp"
#include "delin/random.hpp"
#include "delin/service.hpp"
#include "delin/solver.hpp"
