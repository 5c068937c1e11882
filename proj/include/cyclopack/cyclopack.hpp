#pragma once

#include "cyclopack/averaging_search.hpp"
#include "cyclopack/bounds_tables.hpp"
#include "cyclopack/cyclotomic.hpp"
#include "cyclopack/enumeration.hpp"
#include "cyclopack/interval.hpp"
#include "cyclopack/lattice_reduction.hpp"
#include "cyclopack/matrix.hpp"
#include "cyclopack/polarized_lattice.hpp"
#include "cyclopack/random.hpp"
#include "cyclopack/rational.hpp"
#include "cyclopack/trace_geometry.hpp"
#include "cyclopack/verification.hpp"
