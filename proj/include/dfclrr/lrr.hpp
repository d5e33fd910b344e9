#pragma once

#include <memory>

#include "dfclrr/linalg.hpp"
#include "dfclrr/types.hpp"

namespace dfclrr {

/// Proximal operator of tau*||.||_*: soft-thresholds the spectrum.
Matrix svt(const Matrix& a, double tau);

/// Proximal operator of tau*||.||_{2,1}: shrinks each column's norm.
Matrix col_shrink(const Matrix& a, double tau);

struct LrrProblem {
    Matrix dictionary;   // m x n
    Matrix observation;  // m x l
    double lambda = 0.0;
};

struct SolverOptions {
    double mu0 = 1e-6;
    double rho = 1.1;
    double mu_max = 1e10;
    double tol_primal = 1e-8;
    int max_iters = 1000;
};

struct LrrSolution {
    Matrix z;  // n x l
    Matrix s;  // m x l
    double objective = 0.0;
    double primal_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Dictionary state shared across subproblem solves: the Gram factor
/// (I + M^T M)^{-1} is computed once and is read-only afterwards.
class LrrDictionary {
public:
    explicit LrrDictionary(Matrix m);

    const Matrix& matrix() const { return m_; }
    const Matrix& gram_inverse() const { return gram_inv_; }
    Index rows() const { return m_.rows(); }
    Index cols() const { return m_.cols(); }

    LrrSolution solve(const Matrix& observation, double lambda,
                      const SolverOptions& opts = {}) const;

private:
    Matrix m_;
    Matrix gram_inv_;  // (I + M^T M)^{-1}, n x n
};

/// min ||Z||_* + lambda*||S||_{2,1}  s.t.  C = M Z + S,
/// via inexact ALM with an auxiliary split Z = J.
LrrSolution solve_lrr(const LrrProblem& problem, const SolverOptions& opts = {});

/// 3 / (7 ||M|| sqrt(gamma_star * l)).
double default_lambda_theory(double m_norm, double gamma_star, Index l);

/// 1 / sqrt(max(m, n)).
double default_lambda_practical(Index m, Index n);

}  // namespace dfclrr
