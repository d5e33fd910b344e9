#pragma once

#include "dfclrr/types.hpp"

namespace dfclrr {

struct SvdOptions {
    double rank_tol = 1e-8;  // relative to sigma_1
    Index max_rank = -1;     // <0: no cap
    int power_iters = 100;   // budget for spectral_norm estimation
};

/// Compact SVD: u (m x r), sigma (r, positive, non-increasing), v (n x r).
struct CompactSvd {
    Matrix u;
    Vector sigma;
    Matrix v;

    Index rank() const { return sigma.size(); }
    Matrix reconstruct() const { return u * sigma.asDiagonal() * v.transpose(); }
};

/// Factors of the numerical-rank part of `a`; rank r = |{s_i > rank_tol * s_1}|.
/// Column signs are fixed (largest-magnitude entry of each left vector positive).
/// Throws on the zero matrix.
CompactSvd compact_svd(const Matrix& a, const SvdOptions& opts = {});

/// Best rank-k factors (Eckart-Young); exact zero singular values are dropped.
CompactSvd truncated_svd(const Matrix& a, Index k);

/// Largest singular value via power iteration on a^T a.
double spectral_norm(const Matrix& a, int power_iters = 100);

/// Per-column Euclidean norms; max of the result is the 2,inf norm.
Vector col_l2_norms(const Matrix& a);

double nuclear_norm(const Matrix& a);
double l21_norm(const Matrix& a);

/// basis * (basis^T * a); basis must have orthonormal columns (checked to 1e-8).
Matrix project_onto_colspace(const Matrix& basis, const Matrix& a);

}  // namespace dfclrr
