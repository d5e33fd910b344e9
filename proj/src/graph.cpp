#include "dfclrr/graph.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <queue>
#include <sstream>

#include "dfclrr/linalg.hpp"
#include "dfclrr/parallel.hpp"
#include "dfclrr/segmentation.hpp"

namespace dfclrr {

SparseGraph knn_graph(const Matrix& x, Index k, double sigma) {
    const Index n = x.cols();
    require(n >= 2, "knn_graph: need at least two samples");
    require(k >= 1 && k < n, "knn_graph: need 1 <= k < n");

    // Candidate set: j in kNN(i) for each i, deduplicated as i < j.
    std::map<std::pair<Index, Index>, double> picked;
    std::vector<std::pair<double, Index>> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j)
            order[static_cast<std::size_t>(j)] = {(x.col(i) - x.col(j)).norm(), j};
        order[static_cast<std::size_t>(i)].first =
            std::numeric_limits<double>::infinity();  // exclude self
        std::sort(order.begin(), order.end());
        for (Index t = 0; t < k; ++t) {
            const auto& [dist, j] = order[static_cast<std::size_t>(t)];
            const auto key = std::minmax(i, j);
            picked[{key.first, key.second}] = dist;
        }
    }

    if (sigma <= 0.0) {
        // Median candidate-edge distance; scale-free default.
        std::vector<double> dists;
        dists.reserve(picked.size());
        for (const auto& [key, dist] : picked) dists.push_back(dist);
        std::sort(dists.begin(), dists.end());
        const std::size_t mid = dists.size() / 2;
        sigma = dists.size() % 2 ? dists[mid]
                                 : 0.5 * (dists[mid - 1] + dists[mid]);
        if (sigma <= 0.0) sigma = 1.0;  // all-duplicate degenerate case
    }

    SparseGraph g;
    g.n = n;
    g.symmetric = true;
    g.edges.reserve(picked.size());
    for (const auto& [key, dist] : picked)
        g.edges.push_back({key.first, key.second, std::exp(-dist * dist / (sigma * sigma))});
    return g;
}

SpgResult spg_solve(const Vector& x, const Matrix& d, const SpgOptions& opts) {
    require(d.cols() >= 1, "spg_solve: empty basis");
    require(d.rows() == x.size(), "spg_solve: dimension mismatch");
    require(opts.alpha > 0, "spg_solve: alpha must be positive");

    const Index p = d.cols();
    const Matrix gram = d.transpose() * d;
    const Vector dtx = d.transpose() * x;

    SpgResult res;
    res.w = Vector::Zero(p);
    Vector grad_half = -dtx;  // (G w - D^T x), kept incrementally

    const auto kkt = [&]() {
        double worst = 0.0;
        for (Index j = 0; j < p; ++j) {
            const double g = 2.0 * grad_half(j) + opts.alpha;
            worst = std::max(worst, res.w(j) > 0.0 ? std::abs(g) : std::max(0.0, -g));
        }
        return worst;
    };

    for (int sweep = 1; sweep <= opts.max_iters; ++sweep) {
        for (Index j = 0; j < p; ++j) {
            const double gjj = gram(j, j);
            if (gjj <= 0.0) continue;  // zero column stays at zero
            const double old = res.w(j);
            const double candidate = old - (2.0 * grad_half(j) + opts.alpha) / (2.0 * gjj);
            const double next = std::max(0.0, candidate);
            if (next != old) {
                grad_half += gram.col(j) * (next - old);
                res.w(j) = next;
            }
        }
        // Refresh the incremental gradient; it drifts over many sweeps.
        grad_half.noalias() = gram * res.w - dtx;
        res.sweeps = sweep;
        res.kkt_residual = kkt();
        if (res.kkt_residual <= opts.tol) {
            res.converged = true;
            break;
        }
    }
    res.w = res.w.cwiseMax(0.0);
    return res;
}

namespace {

// Shared back end for spg_graph / slr_graph: `score(j, i)` ranks candidate
// neighbors j of sample i, larger first (ties by index).
SparseGraph spg_backend(const Matrix& m, const SpgOptions& opts, Symmetrize mode,
                        unsigned workers, std::vector<bool>* converged_out,
                        const std::function<double(Index, Index)>& score) {
    const Index n = m.cols();
    require(n >= 2, "spg graph: need at least two samples");
    require(opts.n_k >= 1, "spg graph: n_k must be positive");
    const Index basis_size = std::min<Index>(opts.n_k, n - 1);

    std::vector<std::vector<std::pair<Index, double>>> directed(
        static_cast<std::size_t>(n));
    std::vector<bool> converged(static_cast<std::size_t>(n), true);

    parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t si) {
        const Index i = static_cast<Index>(si);
        std::vector<std::pair<double, Index>> ranked;
        ranked.reserve(static_cast<std::size_t>(n - 1));
        for (Index j = 0; j < n; ++j)
            if (j != i) ranked.push_back({-score(j, i), j});
        std::sort(ranked.begin(), ranked.end());

        Matrix basis(m.rows(), basis_size);
        std::vector<Index> chosen(static_cast<std::size_t>(basis_size));
        for (Index t = 0; t < basis_size; ++t) {
            chosen[static_cast<std::size_t>(t)] = ranked[static_cast<std::size_t>(t)].second;
            basis.col(t) = m.col(ranked[static_cast<std::size_t>(t)].second);
        }

        const SpgResult res = spg_solve(m.col(i), basis, opts);
        converged[si] = res.converged;
        auto& out = directed[si];
        for (Index t = 0; t < basis_size; ++t)
            if (res.w(t) > 0.0)
                out.push_back({chosen[static_cast<std::size_t>(t)], res.w(t)});
    });

    std::map<std::pair<Index, Index>, std::pair<double, double>> merged;
    for (Index i = 0; i < n; ++i) {
        for (const auto& [j, w] : directed[static_cast<std::size_t>(i)]) {
            const bool forward = i < j;
            const auto key = std::minmax(i, j);
            auto& slot = merged[{key.first, key.second}];
            (forward ? slot.first : slot.second) = w;
        }
    }

    SparseGraph g;
    g.n = n;
    g.symmetric = true;
    for (const auto& [key, pair] : merged) {
        const double w = mode == Symmetrize::kMax ? std::max(pair.first, pair.second)
                                                  : 0.5 * (pair.first + pair.second);
        if (w > 0.0) g.edges.push_back({key.first, key.second, w});
    }
    if (converged_out) *converged_out = std::move(converged);
    return g;
}

}  // namespace

SparseGraph spg_graph(const Matrix& m, const SpgOptions& opts, Symmetrize mode,
                      unsigned workers, std::vector<bool>* converged_out) {
    return spg_backend(m, opts, mode, workers, converged_out,
                       [&](Index j, Index i) { return -(m.col(j) - m.col(i)).norm(); });
}

SparseGraph slr_graph(const Matrix& m, const LowRankFactor& z_hat,
                      const SpgOptions& opts, Symmetrize mode, unsigned workers,
                      std::vector<bool>* converged_out) {
    require(z_hat.cols() == m.cols(), "slr_graph: z_hat not column-aligned with m");
    const Matrix affinity = affinity_from_z(z_hat, z_hat.rank());
    return spg_backend(m, opts, mode, workers, converged_out,
                       [&](Index j, Index i) { return affinity(j, i); });
}

PropagationResult label_propagate(const SparseGraph& g, const std::vector<Index>& seeds,
                                  bool clamp) {
    require(g.symmetric, "label_propagate: graph must be symmetric");
    require(seeds.size() == static_cast<std::size_t>(g.n),
            "label_propagate: seed vector length mismatch");
    Index num_classes = 0;
    for (Index s : seeds) num_classes = std::max(num_classes, s + 1);
    require(num_classes >= 1, "label_propagate: need at least one seed");

    std::vector<std::vector<std::pair<Index, double>>> adj(
        static_cast<std::size_t>(g.n));
    for (const Edge& e : g.edges) {
        require(e.i != e.j, "label_propagate: self loop");
        adj[static_cast<std::size_t>(e.i)].push_back({e.j, e.weight});
        adj[static_cast<std::size_t>(e.j)].push_back({e.i, e.weight});
    }

    // Components reachable from a seed keep harmonic scores; others are flagged.
    std::vector<int> component(static_cast<std::size_t>(g.n), -1);
    int num_components = 0;
    for (Index start = 0; start < g.n; ++start) {
        if (component[static_cast<std::size_t>(start)] >= 0) continue;
        const int id = num_components++;
        std::queue<Index> frontier;
        frontier.push(start);
        component[static_cast<std::size_t>(start)] = id;
        while (!frontier.empty()) {
            const Index u = frontier.front();
            frontier.pop();
            for (const auto& [v, w] : adj[static_cast<std::size_t>(u)]) {
                if (component[static_cast<std::size_t>(v)] < 0) {
                    component[static_cast<std::size_t>(v)] = id;
                    frontier.push(v);
                }
            }
        }
    }
    std::vector<bool> component_seeded(static_cast<std::size_t>(num_components), false);
    for (Index i = 0; i < g.n; ++i)
        if (seeds[static_cast<std::size_t>(i)] >= 0)
            component_seeded[static_cast<std::size_t>(component[static_cast<std::size_t>(i)])] = true;

    PropagationResult result;
    result.scores = Matrix::Zero(g.n, num_classes);
    result.unreachable.assign(static_cast<std::size_t>(g.n), false);

    std::vector<Index> unlabeled;
    std::vector<Index> slot(static_cast<std::size_t>(g.n), -1);
    for (Index i = 0; i < g.n; ++i) {
        const bool seeded_comp =
            component_seeded[static_cast<std::size_t>(component[static_cast<std::size_t>(i)])];
        if (seeds[static_cast<std::size_t>(i)] >= 0) {
            result.scores(i, seeds[static_cast<std::size_t>(i)]) = 1.0;
        } else if (!seeded_comp) {
            result.unreachable[static_cast<std::size_t>(i)] = true;
            result.scores.row(i).setConstant(1.0 / static_cast<double>(num_classes));
        } else {
            slot[static_cast<std::size_t>(i)] = static_cast<Index>(unlabeled.size());
            unlabeled.push_back(i);
        }
    }

    if (!unlabeled.empty()) {
        const Index u = static_cast<Index>(unlabeled.size());
        Matrix laplacian = Matrix::Zero(u, u);
        Matrix boundary = Matrix::Zero(u, num_classes);
        for (Index a = 0; a < u; ++a) {
            const Index node = unlabeled[static_cast<std::size_t>(a)];
            double degree = 0.0;
            for (const auto& [v, w] : adj[static_cast<std::size_t>(node)]) {
                degree += w;
                if (slot[static_cast<std::size_t>(v)] >= 0) {
                    laplacian(a, slot[static_cast<std::size_t>(v)]) -= w;
                } else if (seeds[static_cast<std::size_t>(v)] >= 0) {
                    boundary(a, seeds[static_cast<std::size_t>(v)]) += w;
                }
                // Edges into unreachable neighbors cannot occur: components.
            }
            laplacian(a, a) += degree;
        }
        const Matrix f = Eigen::LDLT<Matrix>(laplacian).solve(boundary);
        if (!f.allFinite())
            throw numerical_error("label_propagate: singular Laplacian system");
        for (Index a = 0; a < u; ++a)
            result.scores.row(unlabeled[static_cast<std::size_t>(a)]) = f.row(a);
    }

    if (!clamp) {
        // Soft seeds: replace each seed row by its neighborhood average.
        Matrix smoothed = result.scores;
        for (Index i = 0; i < g.n; ++i) {
            if (seeds[static_cast<std::size_t>(i)] < 0) continue;
            double degree = 0.0;
            Vector acc = Vector::Zero(num_classes);
            for (const auto& [v, w] : adj[static_cast<std::size_t>(i)]) {
                degree += w;
                acc += w * result.scores.row(v).transpose();
            }
            if (degree > 0) smoothed.row(i) = acc.transpose() / degree;
        }
        result.scores = std::move(smoothed);
    }
    return result;
}

void write_edge_csv(const std::string& path, const SparseGraph& g) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out.precision(17);
    out << "i,j,weight\n";
    for (const Edge& e : g.edges) out << e.i << ',' << e.j << ',' << e.weight << '\n';
    if (!out) throw io_error("write failed: " + path);
}

SparseGraph read_edge_csv(const std::string& path, Index n, bool symmetric) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    SparseGraph g;
    g.n = n;
    g.symmetric = symmetric;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line.rfind("i,", 0) == 0) {
            first = false;
            continue;  // header
        }
        first = false;
        std::stringstream ss(line);
        std::string cell;
        Edge e;
        std::getline(ss, cell, ',');
        e.i = std::stoll(cell);
        std::getline(ss, cell, ',');
        e.j = std::stoll(cell);
        std::getline(ss, cell, ',');
        e.weight = std::stod(cell);
        if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n || e.i == e.j)
            throw io_error(path + ": bad edge");
        if (!(std::isfinite(e.weight) && e.weight >= 0.0))
            throw io_error(path + ": bad edge weight");
        g.edges.push_back(e);
    }
    return g;
}

}  // namespace dfclrr
