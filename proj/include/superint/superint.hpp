#ifndef SUPERINT_SUPERINT_HPP
#define SUPERINT_SUPERINT_HPP

#include "superint/core.hpp"
#include "superint/rational.hpp"
#include "superint/potentials.hpp"
#include "superint/hamiltonians.hpp"
#include "superint/invariants.hpp"
#include "superint/dop853.hpp"
#include "superint/dynamics.hpp"
#include "superint/parallel.hpp"
#include "superint/sampling.hpp"
#include "superint/verify.hpp"
#include "superint/config.hpp"
#include "superint/commands.hpp"

#endif  // SUPERINT_SUPERINT_HPP
