#ifndef SPBOUNDS_SPBOUNDS_HPP
#define SPBOUNDS_SPBOUNDS_HPP

#include "spbounds/bounds.hpp"
#include "spbounds/error.hpp"
#include "spbounds/generators.hpp"
#include "spbounds/harness.hpp"
#include "spbounds/io.hpp"
#include "spbounds/linalg.hpp"
#include "spbounds/problem.hpp"
#include "spbounds/report.hpp"

#endif  // SPBOUNDS_SPBOUNDS_HPP
