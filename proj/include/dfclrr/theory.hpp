#pragma once

#include <vector>

#include "dfclrr/linalg.hpp"
#include "dfclrr/types.hpp"

namespace dfclrr {

struct CoherenceResult {
    double mu = 0.0;
    Index rank = 0;
};

/// (mu, r)-coherence of a nonzero matrix: r is the numerical rank and
/// mu = (n/r) * max row norm^2 of the right singular factor.
CoherenceResult coherence(const Matrix& l, const SvdOptions& opts = {});

/// Largest beta such that ||Sigma_M^{-1} V_M^T V_{L0}|| <= 1/(beta ||M||).
double rwd_beta(const Matrix& m, const Matrix& l0, const SvdOptions& opts = {});

/// 324 b^2 / (324 b^2 + 49 (11 + 4b)^2 mu r); critical outlier fraction.
double gamma_star(double beta, double mu, Index r);

/// ceil(c * r * mu * ln(4n/delta) / (gamma_star - gamma)^2).
/// May exceed n; callers sampling columns clamp as needed.
Index sample_size_bound(Index r, double mu, Index n, double delta, double gamma,
                        double gamma_star, double c);

struct TheoryParams {
    Index rank_r = 0;
    double mu = 0.0;
    double beta = 0.0;
    double gamma_star = 0.0;
};

struct RecoveryReport {
    double rowspace_residual = 0.0;
    double support_residual = 0.0;
    bool success = false;
    double tolerance = 1e-4;
};

/// Oracle-constraint check: Z must lie in the row space of l0 and S must be
/// supported on the outlier columns, both to relative tolerance epsilon.
RecoveryReport check_recovery(const Matrix& z, const Matrix& l0,
                              const std::vector<Index>& outlier_support,
                              const Matrix& s, double epsilon = 1e-4);
RecoveryReport check_recovery(const LowRankFactor& z, const Matrix& l0,
                              const std::vector<Index>& outlier_support,
                              const Matrix& s, double epsilon = 1e-4);

}  // namespace dfclrr
