#pragma once

#include "delta_engine.hpp"
#include "delta_table.hpp"
#include "error.hpp"
#include "flow.hpp"
#include "generate.hpp"
#include "labeling.hpp"
#include "labeling_json.hpp"
#include "matching.hpp"
#include "oracle.hpp"
#include "partition.hpp"
#include "preprocess.hpp"
#include "solver.hpp"
#include "tree.hpp"
