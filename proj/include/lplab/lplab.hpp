#pragma once

#include "bands.hpp"
#include "corpus.hpp"
#include "differences.hpp"
#include "error.hpp"
#include "field.hpp"
#include "io.hpp"
#include "maximal.hpp"
#include "quadrature.hpp"
#include "quasinorms.hpp"
#include "verify.hpp"
#include "report.hpp"
