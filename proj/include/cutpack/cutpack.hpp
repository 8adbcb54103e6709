#pragma once

#include "cutpack/errors.hpp"
#include "cutpack/family.hpp"
#include "cutpack/generators.hpp"
#include "cutpack/instance.hpp"
#include "cutpack/io.hpp"
#include "cutpack/laminar.hpp"
#include "cutpack/lp.hpp"
#include "cutpack/oracle.hpp"
#include "cutpack/pipeline.hpp"
#include "cutpack/rational.hpp"
#include "cutpack/rounding.hpp"
#include "cutpack/simplex.hpp"
#include "cutpack/vertex_set.hpp"
