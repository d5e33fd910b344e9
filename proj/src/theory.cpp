#include "dfclrr/theory.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace dfclrr {

CoherenceResult coherence(const Matrix& l, const SvdOptions& opts) {
    CompactSvd svd = compact_svd(l, opts);  // throws on zero input
    const double max_row_sq = svd.v.rowwise().squaredNorm().maxCoeff();
    CoherenceResult out;
    out.rank = svd.rank();
    out.mu = static_cast<double>(l.cols()) / static_cast<double>(out.rank) * max_row_sq;
    return out;
}

double rwd_beta(const Matrix& m, const Matrix& l0, const SvdOptions& opts) {
    require(m.cols() == l0.cols(), "rwd_beta: column count mismatch");
    CompactSvd sm = compact_svd(m, opts);
    CompactSvd sl = compact_svd(l0, opts);
    const Matrix cross =
        sm.sigma.cwiseInverse().asDiagonal() * (sm.v.transpose() * sl.v);
    Eigen::JacobiSVD<Matrix> svd(cross);
    const double cross_norm = svd.singularValues()(0);
    if (cross_norm <= 0)
        throw numerical_error("rwd_beta: degenerate cross term");
    return 1.0 / (sm.sigma(0) * cross_norm);
}

double gamma_star(double beta, double mu, Index r) {
    require(beta > 0, "gamma_star: beta must be positive");
    require(mu >= 1, "gamma_star: mu must be >= 1");
    require(r >= 1, "gamma_star: r must be >= 1");
    const double b2 = 324.0 * beta * beta;
    const double tail = 49.0 * (11.0 + 4.0 * beta) * (11.0 + 4.0 * beta) * mu *
                        static_cast<double>(r);
    return b2 / (b2 + tail);
}

Index sample_size_bound(Index r, double mu, Index n, double delta, double gamma,
                        double gamma_star, double c) {
    require(r >= 1 && n >= 1, "sample_size_bound: r, n must be >= 1");
    require(delta > 0 && delta < 1, "sample_size_bound: delta in (0,1)");
    require(c > 1, "sample_size_bound: c must exceed 1");
    require(gamma < gamma_star, "sample_size_bound: requires gamma < gamma_star");
    const double gap = gamma_star - gamma;
    const double raw = c * static_cast<double>(r) * mu *
                       std::log(4.0 * static_cast<double>(n) / delta) / (gap * gap);
    return static_cast<Index>(std::ceil(raw));
}

namespace {

RecoveryReport check_impl(const Matrix& z, double z_norm, const Matrix& l0,
                          const std::vector<Index>& outlier_support,
                          const Matrix& s, double epsilon) {
    require(epsilon > 0, "check_recovery: epsilon must be positive");
    CompactSvd svd = compact_svd(l0);
    const Matrix& v = svd.v;  // n x r, row-space basis of l0
    require(z.rows() == v.rows(), "check_recovery: Z rows must match l0 columns");

    RecoveryReport report;
    report.tolerance = epsilon;
    const Matrix residual = z - v * (v.transpose() * z);
    report.rowspace_residual = residual.norm() / std::max(1.0, z_norm);

    std::vector<bool> is_outlier(static_cast<std::size_t>(s.cols()), false);
    for (Index idx : outlier_support) {
        require(idx >= 0 && idx < s.cols(), "check_recovery: support index out of range");
        is_outlier[static_cast<std::size_t>(idx)] = true;
    }
    double off_sq = 0.0;
    for (Index jcol = 0; jcol < s.cols(); ++jcol)
        if (!is_outlier[static_cast<std::size_t>(jcol)])
            off_sq += s.col(jcol).squaredNorm();
    report.support_residual = std::sqrt(off_sq) / std::max(1.0, s.norm());

    report.success = report.rowspace_residual <= epsilon &&
                     report.support_residual <= epsilon;
    return report;
}

}  // namespace

RecoveryReport check_recovery(const Matrix& z, const Matrix& l0,
                              const std::vector<Index>& outlier_support,
                              const Matrix& s, double epsilon) {
    return check_impl(z, z.norm(), l0, outlier_support, s, epsilon);
}

RecoveryReport check_recovery(const LowRankFactor& z, const Matrix& l0,
                              const std::vector<Index>& outlier_support,
                              const Matrix& s, double epsilon) {
    const Matrix dense = z.dense();
    return check_impl(dense, dense.norm(), l0, outlier_support, s, epsilon);
}

}  // namespace dfclrr
