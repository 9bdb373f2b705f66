#pragma once

#include "dtiboost/balance.hpp"
#include "dtiboost/boost.hpp"
#include "dtiboost/config.hpp"
#include "dtiboost/corpus.hpp"
#include "dtiboost/error.hpp"
#include "dtiboost/eval.hpp"
#include "dtiboost/features.hpp"
#include "dtiboost/fetch.hpp"
#include "dtiboost/io.hpp"
#include "dtiboost/matrix.hpp"
#include "dtiboost/metrics.hpp"
#include "dtiboost/model_io.hpp"
#include "dtiboost/pipeline.hpp"
#include "dtiboost/tree.hpp"
