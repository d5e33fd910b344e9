#include "dfclrr/linalg.hpp"

#include <Eigen/SVD>

namespace dfclrr {

namespace {

// Thin SVD of a; Jacobi below the BDCSVD crossover, BDC above.
void thin_svd(const Matrix& a, Matrix& u, Vector& s, Matrix& v) {
    if (std::min(a.rows(), a.cols()) <= 16) {
        Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u = svd.matrixU();
        s = svd.singularValues();
        v = svd.matrixV();
    } else {
        Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        u = svd.matrixU();
        s = svd.singularValues();
        v = svd.matrixV();
    }
}

void fix_column_signs(Matrix& u, Matrix& v) {
    for (Index k = 0; k < u.cols(); ++k) {
        Index imax = 0;
        u.col(k).cwiseAbs().maxCoeff(&imax);
        if (u(imax, k) < 0) {
            u.col(k) = -u.col(k);
            v.col(k) = -v.col(k);
        }
    }
}

CompactSvd take_leading(Matrix& u, Vector& s, Matrix& v, Index r) {
    CompactSvd out;
    out.u = u.leftCols(r);
    out.sigma = s.head(r);
    out.v = v.leftCols(r);
    fix_column_signs(out.u, out.v);
    return out;
}

}  // namespace

CompactSvd compact_svd(const Matrix& a, const SvdOptions& opts) {
    require(a.size() > 0, "compact_svd: empty matrix");
    require(all_finite(a), "compact_svd: non-finite entries");
    require(opts.rank_tol > 0, "compact_svd: rank_tol must be positive");
    if (a.isZero(0.0)) throw std::invalid_argument("compact_svd: zero matrix has no compact SVD");

    Matrix u, v;
    Vector s;
    thin_svd(a, u, s, v);
    const double cutoff = opts.rank_tol * s(0);
    Index r = 0;
    while (r < s.size() && s(r) > cutoff) ++r;
    if (opts.max_rank >= 0) r = std::min(r, opts.max_rank);
    if (r == 0) throw std::invalid_argument("compact_svd: numerically zero matrix");
    return take_leading(u, s, v, r);
}

CompactSvd truncated_svd(const Matrix& a, Index k) {
    require(a.size() > 0, "truncated_svd: empty matrix");
    require(k >= 1 && k <= std::min(a.rows(), a.cols()),
            "truncated_svd: k out of range");
    if (a.isZero(0.0)) throw std::invalid_argument("truncated_svd: zero matrix");

    Matrix u, v;
    Vector s;
    thin_svd(a, u, s, v);
    Index r = 0;
    while (r < k && s(r) > 0.0) ++r;
    return take_leading(u, s, v, r);
}

double spectral_norm(const Matrix& a, int power_iters) {
    require(a.size() > 0, "spectral_norm: empty matrix");
    require(power_iters >= 1, "spectral_norm: power_iters must be >= 1");
    if (a.isZero(0.0)) return 0.0;

    // Start from the heaviest column so the iterate is never orthogonal
    // to the dominant subspace by construction.
    Index jmax = 0;
    col_l2_norms(a).maxCoeff(&jmax);
    Vector x = a.col(jmax);
    if (x.norm() == 0.0) x = Vector::Ones(a.rows());
    x.normalize();

    double est = 0.0;
    for (int it = 0; it < power_iters; ++it) {
        Vector y = a.transpose() * x;
        const double yn = y.norm();
        if (yn == 0.0) return 0.0;
        Vector z = a * (y / yn);
        const double next = z.norm();
        x = z / next;
        if (std::abs(next - est) <= 1e-13 * next) return next;
        est = next;
    }
    return est;
}

Vector col_l2_norms(const Matrix& a) { return a.colwise().norm(); }

double nuclear_norm(const Matrix& a) {
    if (a.size() == 0 || a.isZero(0.0)) return 0.0;
    Matrix u, v;
    Vector s;
    thin_svd(a, u, s, v);
    return s.sum();
}

double l21_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return col_l2_norms(a).sum();
}

Matrix project_onto_colspace(const Matrix& basis, const Matrix& a) {
    require(basis.rows() == a.rows(), "project_onto_colspace: row mismatch");
    const Matrix gram = basis.transpose() * basis;
    const double dev = (gram - Matrix::Identity(basis.cols(), basis.cols()))
                           .cwiseAbs()
                           .maxCoeff();
    require(dev <= 1e-8, "project_onto_colspace: basis columns not orthonormal");
    return basis * (basis.transpose() * a);
}

}  // namespace dfclrr
