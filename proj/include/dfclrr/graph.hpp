#pragma once

#include <vector>

#include "dfclrr/types.hpp"

namespace dfclrr {

struct Edge {
    Index i = 0;
    Index j = 0;
    double weight = 0.0;
};

/// Weighted graph; no self-loops, non-negative finite weights. When
/// `symmetric` is set each undirected edge is stored once with i < j.
struct SparseGraph {
    Index n = 0;
    std::vector<Edge> edges;
    bool symmetric = true;
};

/// Undirected kNN graph over the columns of x; i-j linked when either is
/// among the other's k nearest by Euclidean distance; weights exp(-d^2/s^2).
/// sigma <= 0 selects the median distance over the candidate edges.
SparseGraph knn_graph(const Matrix& x, Index k, double sigma = 0.0);

struct SpgOptions {
    double alpha = 0.05;
    Index n_k = 500;
    int max_iters = 20000;
    double tol = 1e-8;
};

struct SpgResult {
    Vector w;
    bool converged = false;
    int sweeps = 0;
    double kkt_residual = 0.0;
};

/// min ||x - D w||_2^2 + alpha ||w||_1  s.t. w >= 0, by cyclic coordinate
/// descent; convergence measured by the KKT residual.
SpgResult spg_solve(const Vector& x, const Matrix& d, const SpgOptions& opts);

enum class Symmetrize { kMax, kMean };

/// Per-sample non-negative lasso over the n_k nearest neighbors by Euclidean
/// distance; directed weights symmetrized (default: max).
SparseGraph spg_graph(const Matrix& m, const SpgOptions& opts,
                      Symmetrize mode = Symmetrize::kMax, unsigned workers = 1,
                      std::vector<bool>* converged_out = nullptr);

/// Two-step construction: rank candidate neighbors by the projector affinity
/// of z_hat, then solve a non-negative lasso per sample over the selected
/// columns of m. Directed weights are symmetrized (default: max).
SparseGraph slr_graph(const Matrix& m, const LowRankFactor& z_hat,
                      const SpgOptions& opts, Symmetrize mode = Symmetrize::kMax,
                      unsigned workers = 1, std::vector<bool>* converged_out = nullptr);

struct PropagationResult {
    Matrix scores;                   // n x num_classes
    std::vector<bool> unreachable;   // unlabeled nodes with no seeded component
};

/// Harmonic label propagation: seed rows clamped to one-hot, unlabeled rows
/// solve the graph Laplacian system. seeds[i] < 0 marks node i unlabeled.
/// Components without any seed get uniform scores and an unreachable flag.
/// With clamp=false, seed rows are afterwards replaced by the weighted mean
/// of their neighbors' scores (soft seeds).
PropagationResult label_propagate(const SparseGraph& g, const std::vector<Index>& seeds,
                                  bool clamp = true);

/// CSV edge list "i,j,weight"; symmetric graphs emit each edge once (i < j).
void write_edge_csv(const std::string& path, const SparseGraph& g);
SparseGraph read_edge_csv(const std::string& path, Index n, bool symmetric);

}  // namespace dfclrr
