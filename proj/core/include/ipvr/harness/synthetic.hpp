#pragma once

#include <cstdint>

#include "ipvr/common.hpp"
#include "ipvr/harness/libsvm.hpp"

namespace ipvr::harness {

enum class SyntheticKind { Regression, Classification };

/// Dense n x d design whose Gram matrix (1/n) A^T A has eigenvalues spaced
/// geometrically from 1 down to 1/cond, in a random orthonormal basis.
DenseMatrix ill_conditioned_design(Index n, Index d, double cond, std::uint64_t seed);

/// Regression: b = A x_true + 0.01 noise with a sparse x_true.
/// Classification: b = sign(A x_true + 0.1 noise) in {-1, +1}.
Dataset gen_synthetic(Index n, Index d, double cond, std::uint64_t seed, SyntheticKind kind);

}  // namespace ipvr::harness
