/*!
  \file pbnpin.hpp
  \brief Umbrella header.
*/

#pragma once

#include "boolexpr.hpp"
#include "matrix.hpp"
#include "model.hpp"
#include "parse.hpp"
#include "pinsynth.hpp"
#include "pipeline.hpp"
#include "rational.hpp"
#include "report.hpp"
#include "steadypin.hpp"
#include "stp.hpp"
#include "verify.hpp"
#include "wiring.hpp"
