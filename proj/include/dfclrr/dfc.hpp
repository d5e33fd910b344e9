#pragma once

#include <cstdint>
#include <vector>

#include "dfclrr/lrr.hpp"
#include "dfclrr/types.hpp"

namespace dfclrr {

struct PartitionPlan {
    Index n = 0;
    std::vector<std::vector<Index>> blocks;
    std::uint64_t seed = 0;
};

/// Uniformly random partition of {0,...,n-1} into t blocks (shuffle, then
/// chunk; the first n mod t blocks get one extra column). Indices within a
/// block are sorted ascending. Deterministic given seed.
PartitionPlan partition_columns(Index n, Index t, std::uint64_t seed);

/// basis = orthonormal column basis of blocks[anchor_index] (compact SVD);
/// coeff = basis^T [blocks...] concatenated in list order.
std::pair<Matrix, Matrix> column_project(const std::vector<Matrix>& blocks,
                                         std::size_t anchor_index);

enum class LambdaScaling {
    kSqrtRatio,  // lambda_i = lambda * sqrt(n / l_i); t=1 reproduces full LRR
    kNone,       // use lambda as given in every subproblem
};

struct DfcOptions {
    SolverOptions solver;
    unsigned parallelism = 1;
    std::size_t anchor_index = 0;
    LambdaScaling lambda_scaling = LambdaScaling::kSqrtRatio;
};

struct BlockDiagnostics {
    std::vector<Index> columns;
    double objective = 0.0;
    double primal_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    Index rank = 0;
    double solve_seconds = 0.0;
};

struct DfcResult {
    LowRankFactor z_hat;  // basis (n x r') orthonormal, coeff (r' x n)
    Matrix s;             // m x n, block outlier estimates scattered back
    std::vector<BlockDiagnostics> block_diagnostics;
    PartitionPlan plan;
    double combine_seconds = 0.0;
    double max_block_seconds = 0.0;

    /// Reported wall time convention: longest subproblem plus combine.
    double reported_seconds() const { return max_block_seconds + combine_seconds; }
};

/// Divide-factor-combine: partition columns, solve each block against the
/// full dictionary, scatter solutions back to original column order, then
/// project onto the column space of the anchor block's solution.
DfcResult dfc_lrr(const Matrix& m, Index t, double lambda, std::uint64_t seed,
                  const DfcOptions& opts = {});

}  // namespace dfclrr
