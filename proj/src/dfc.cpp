#include "dfclrr/dfc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "dfclrr/parallel.hpp"
#include "dfclrr/rng.hpp"

namespace dfclrr {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

PartitionPlan partition_columns(Index n, Index t, std::uint64_t seed) {
    require(n >= 1, "partition_columns: n must be positive");
    require(t >= 1 && t <= n, "partition_columns: need 1 <= t <= n");
    Rng rng(seed);
    const std::vector<std::size_t> perm = rng.permutation(static_cast<std::size_t>(n));

    PartitionPlan plan;
    plan.n = n;
    plan.seed = seed;
    plan.blocks.resize(static_cast<std::size_t>(t));
    const Index base = n / t;
    const Index extra = n % t;
    std::size_t pos = 0;
    for (Index b = 0; b < t; ++b) {
        const Index size = base + (b < extra ? 1 : 0);
        auto& block = plan.blocks[static_cast<std::size_t>(b)];
        block.reserve(static_cast<std::size_t>(size));
        for (Index c = 0; c < size; ++c)
            block.push_back(static_cast<Index>(perm[pos++]));
        std::sort(block.begin(), block.end());
    }
    return plan;
}

std::pair<Matrix, Matrix> column_project(const std::vector<Matrix>& blocks,
                                         std::size_t anchor_index) {
    require(!blocks.empty(), "column_project: no blocks");
    require(anchor_index < blocks.size(), "column_project: anchor index out of range");
    const Index rows = blocks.front().rows();
    Index total_cols = 0;
    for (const Matrix& b : blocks) {
        require(b.rows() == rows, "column_project: block row mismatch");
        total_cols += b.cols();
    }
    const Matrix& anchor = blocks[anchor_index];
    if (anchor.isZero(0.0))
        throw std::invalid_argument("column_project: degenerate (zero) anchor block");

    const Matrix basis = compact_svd(anchor).u;
    Matrix coeff(basis.cols(), total_cols);
    Index at = 0;
    for (const Matrix& b : blocks) {
        coeff.middleCols(at, b.cols()).noalias() = basis.transpose() * b;
        at += b.cols();
    }
    return {basis, coeff};
}

DfcResult dfc_lrr(const Matrix& m, Index t, double lambda, std::uint64_t seed,
                  const DfcOptions& opts) {
    const Index n = m.cols();
    require(t >= 1 && t <= n, "dfc_lrr: need 1 <= t <= n");
    require(lambda > 0, "dfc_lrr: lambda must be positive");

    DfcResult result;
    result.plan = partition_columns(n, t, seed);
    require(opts.anchor_index < result.plan.blocks.size(),
            "dfc_lrr: anchor index out of range");

    const LrrDictionary dict(m);
    const std::size_t t_count = result.plan.blocks.size();
    std::vector<Matrix> block_z(t_count);
    std::vector<Matrix> block_s(t_count);
    result.block_diagnostics.resize(t_count);

    parallel_for(t_count, opts.parallelism, [&](std::size_t b) {
        const auto& cols = result.plan.blocks[b];
        const Index l = static_cast<Index>(cols.size());
        Matrix c(m.rows(), l);
        for (Index j = 0; j < l; ++j)
            c.col(j) = m.col(cols[static_cast<std::size_t>(j)]);

        double block_lambda = lambda;
        if (opts.lambda_scaling == LambdaScaling::kSqrtRatio)
            block_lambda *= std::sqrt(static_cast<double>(n) / static_cast<double>(l));

        const auto start = std::chrono::steady_clock::now();
        LrrSolution sol;
        try {
            sol = dict.solve(c, block_lambda, opts.solver);
        } catch (const numerical_error& err) {
            throw numerical_error("dfc_lrr: block " + std::to_string(b) + ": " +
                                  err.what());
        }
        auto& diag = result.block_diagnostics[b];
        diag.solve_seconds = seconds_since(start);
        diag.columns = cols;
        diag.objective = sol.objective;
        diag.primal_residual = sol.primal_residual;
        diag.iterations = sol.iterations;
        diag.converged = sol.converged;
        diag.rank = sol.z.isZero(0.0) ? 0 : compact_svd(sol.z).rank();
        block_z[b] = std::move(sol.z);
        block_s[b] = std::move(sol.s);
    });

    const auto combine_start = std::chrono::steady_clock::now();
    // Scatter block solutions back to original column order before projecting.
    Matrix z_full = Matrix::Zero(n, n);
    result.s = Matrix::Zero(m.rows(), n);
    for (std::size_t b = 0; b < t_count; ++b) {
        const auto& cols = result.plan.blocks[b];
        for (std::size_t j = 0; j < cols.size(); ++j) {
            z_full.col(cols[j]) = block_z[b].col(static_cast<Index>(j));
            result.s.col(cols[j]) = block_s[b].col(static_cast<Index>(j));
        }
    }
    const Matrix& anchor = block_z[opts.anchor_index];
    if (anchor.isZero(0.0))
        throw std::invalid_argument("dfc_lrr: degenerate (zero) anchor solution");
    result.z_hat.basis = compact_svd(anchor).u;
    result.z_hat.coeff.noalias() = result.z_hat.basis.transpose() * z_full;
    result.combine_seconds = seconds_since(combine_start);

    for (const auto& diag : result.block_diagnostics)
        result.max_block_seconds = std::max(result.max_block_seconds, diag.solve_seconds);
    return result;
}

}  // namespace dfclrr
