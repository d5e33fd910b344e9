#include "dfclrr/lrr.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

#include "dfclrr/rng.hpp"

namespace dfclrr {

namespace {

Matrix assemble_shrunk(const Matrix& u, const Vector& s, const Matrix& v, double tau,
                       Index rows, Index cols) {
    Index keep = 0;
    while (keep < s.size() && s(keep) > tau) ++keep;
    if (keep == 0) return Matrix::Zero(rows, cols);
    const Vector shrunk = s.head(keep).array() - tau;
    return u.leftCols(keep) * shrunk.asDiagonal() * v.leftCols(keep).transpose();
}

/// Truncated SVD by subspace iteration with a seeded Gaussian test matrix.
/// Deterministic: the rng stream is owned by the caller and consumed
/// sequentially. Returns at most q factors.
void randomized_svd(const Matrix& a, Index q, Rng& rng, Matrix& u, Vector& s,
                    Matrix& v) {
    const Index small = std::min(a.rows(), a.cols());
    q = std::min(q, small);
    Matrix omega(a.cols(), q);
    for (Index j = 0; j < q; ++j)
        for (Index i = 0; i < omega.rows(); ++i) omega(i, j) = rng.normal();

    Matrix basis = Eigen::HouseholderQR<Matrix>(a * omega)
                       .householderQ() *
                   Matrix::Identity(a.rows(), q);
    for (int pass = 0; pass < 2; ++pass) {
        Matrix w = a.transpose() * basis;
        basis = Eigen::HouseholderQR<Matrix>(a * w).householderQ() *
                Matrix::Identity(a.rows(), q);
    }
    Matrix b = basis.transpose() * a;  // q x cols
    Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    u = basis * svd.matrixU();
    s = svd.singularValues();
    v = svd.matrixV();
}

/// svt with an adaptive rank guess; falls back to the exact path when the
/// guess grows past half the small dimension.
Matrix svt_adaptive(const Matrix& a, double tau, Index& rank_hint, Rng& rng) {
    const Index small = std::min(a.rows(), a.cols());
    if (small <= 32) {
        rank_hint = small;
        return svt(a, tau);
    }
    Index q = std::min<Index>(rank_hint + 8, small);
    while (true) {
        if (q * 2 >= small) {
            Matrix u, v;
            Vector s;
            Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
            u = svd.matrixU();
            s = svd.singularValues();
            Index keep = 0;
            while (keep < s.size() && s(keep) > tau) ++keep;
            rank_hint = std::max<Index>(keep, 1);
            return assemble_shrunk(u, s, svd.matrixV(), tau, a.rows(), a.cols());
        }
        Matrix u, v;
        Vector s;
        randomized_svd(a, q, rng, u, s, v);
        // All computed values above the threshold means values past q may
        // also exceed it; grow and retry.
        if (s(s.size() - 1) > tau) {
            q = std::min(q * 2, small);
            continue;
        }
        Index keep = 0;
        while (keep < s.size() && s(keep) > tau) ++keep;
        rank_hint = std::max<Index>(keep, 1);
        return assemble_shrunk(u, s, v, tau, a.rows(), a.cols());
    }
}

}  // namespace

Matrix svt(const Matrix& a, double tau) {
    require(tau > 0, "svt: tau must be positive");
    require(all_finite(a), "svt: non-finite input");
    if (a.isZero(0.0)) return Matrix::Zero(a.rows(), a.cols());
    Matrix u, v;
    Vector s;
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
    return assemble_shrunk(u, s, v, tau, a.rows(), a.cols());
}

Matrix col_shrink(const Matrix& a, double tau) {
    require(tau > 0, "col_shrink: tau must be positive");
    Matrix out = a;
    for (Index j = 0; j < a.cols(); ++j) {
        const double norm = a.col(j).norm();
        if (norm <= tau)
            out.col(j).setZero();
        else
            out.col(j) *= (1.0 - tau / norm);
    }
    return out;
}

LrrDictionary::LrrDictionary(Matrix m) : m_(std::move(m)) {
    require(m_.size() > 0, "LrrDictionary: empty dictionary");
    require(all_finite(m_), "LrrDictionary: non-finite dictionary");
    const Index n = m_.cols();
    Matrix gram = Matrix::Identity(n, n);
    gram.noalias() += m_.transpose() * m_;
    gram_inv_ = Eigen::LLT<Matrix>(gram).solve(Matrix::Identity(n, n));
}

LrrSolution LrrDictionary::solve(const Matrix& c, double lambda,
                                 const SolverOptions& opts) const {
    require(c.rows() == m_.rows(), "solve_lrr: dictionary/observation row mismatch");
    require(lambda > 0, "solve_lrr: lambda must be positive");
    require(opts.mu0 > 0 && opts.mu0 < opts.mu_max, "solve_lrr: need 0 < mu0 < mu_max");
    require(opts.rho > 1, "solve_lrr: rho must exceed 1");
    require(opts.tol_primal > 0, "solve_lrr: tol_primal must be positive");

    const Index n = m_.cols();
    const Index l = c.cols();
    const double norm_c = std::max(1.0, c.norm());

    LrrSolution sol;
    sol.z = Matrix::Zero(n, l);
    sol.s = Matrix::Zero(m_.rows(), l);
    if (c.isZero(0.0)) {
        sol.converged = true;
        return sol;
    }

    Matrix j = Matrix::Zero(n, l);
    Matrix y1 = Matrix::Zero(m_.rows(), l);
    Matrix y2 = Matrix::Zero(n, l);
    const Matrix mt_c = m_.transpose() * c;
    double mu = opts.mu0;

    Rng rng(0x5EEDFACEul);  // deterministic by construction
    Index rank_hint = 8;

    for (int it = 1; it <= opts.max_iters; ++it) {
        j = svt_adaptive(sol.z + y2 / mu, 1.0 / mu, rank_hint, rng);

        // Z <- (I + M^T M)^{-1} (M^T (C - S + Y1/mu) + J - Y2/mu)
        Matrix rhs = m_.transpose() * (c - sol.s + y1 / mu);
        rhs.noalias() += j;
        rhs.noalias() -= y2 / mu;
        sol.z.noalias() = gram_inv_ * rhs;

        Matrix mz = m_ * sol.z;
        sol.s = col_shrink(c - mz + y1 / mu, lambda / mu);

        Matrix r1 = c - mz - sol.s;
        Matrix r2 = sol.z - j;
        y1.noalias() += mu * r1;
        y2.noalias() += mu * r2;
        mu = std::min(opts.rho * mu, opts.mu_max);

        const double res1 = r1.norm() / norm_c;
        const double res2 = r2.norm() / norm_c;
        if (!std::isfinite(res1) || !std::isfinite(res2))
            throw numerical_error("solve_lrr: non-finite iterate");
        sol.iterations = it;
        sol.primal_residual = res1;
        if (res1 <= opts.tol_primal && res2 <= opts.tol_primal) {
            sol.converged = true;
            break;
        }
    }

    sol.objective = nuclear_norm(sol.z) + lambda * l21_norm(sol.s);
    return sol;
}

LrrSolution solve_lrr(const LrrProblem& problem, const SolverOptions& opts) {
    require(problem.dictionary.rows() == problem.observation.rows(),
            "solve_lrr: dictionary/observation row mismatch");
    LrrDictionary dict(problem.dictionary);
    return dict.solve(problem.observation, problem.lambda, opts);
}

double default_lambda_theory(double m_norm, double gamma_star, Index l) {
    require(m_norm > 0, "default_lambda_theory: m_norm must be positive");
    require(l >= 1, "default_lambda_theory: l must be >= 1");
    require(gamma_star > 0 && gamma_star <= 1,
            "default_lambda_theory: gamma_star outside (0,1]");
    return 3.0 / (7.0 * m_norm * std::sqrt(gamma_star * static_cast<double>(l)));
}

double default_lambda_practical(Index m, Index n) {
    require(m >= 1 && n >= 1, "default_lambda_practical: dimensions must be >= 1");
    return 1.0 / std::sqrt(static_cast<double>(std::max(m, n)));
}

}  // namespace dfclrr
