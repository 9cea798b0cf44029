#pragma once

#include "gaselect/common.hpp"
#include "gaselect/tabular.hpp"
#include "gaselect/design.hpp"
#include "gaselect/logit.hpp"
#include "gaselect/metrics.hpp"
#include "gaselect/cv.hpp"
#include "gaselect/ga.hpp"
#include "gaselect/stepwise.hpp"
#include "gaselect/synthgen.hpp"
#include "gaselect/serialize.hpp"
#include "gaselect/summary.hpp"
#include "gaselect/config.hpp"
#include "gaselect/pipeline.hpp"
