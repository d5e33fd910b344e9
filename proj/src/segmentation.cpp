#include "dfclrr/segmentation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "dfclrr/linalg.hpp"
#include "dfclrr/parallel.hpp"
#include "dfclrr/rng.hpp"

namespace dfclrr {

Matrix affinity_from_z(const Matrix& z, Index rank) {
    require(rank >= 1, "affinity_from_z: rank must be positive");
    require(rank <= std::min(z.rows(), z.cols()), "affinity_from_z: rank too large");
    CompactSvd svd = truncated_svd(z, rank);  // throws on zero z
    return svd.u * svd.u.transpose();
}

Matrix affinity_from_z(const LowRankFactor& z, Index rank) {
    require(rank >= 1, "affinity_from_z: rank must be positive");
    // Left factors of basis*coeff are basis times the left factors of coeff.
    if (z.coeff.isZero(0.0))
        throw std::invalid_argument("affinity_from_z: zero representation");
    CompactSvd svd = truncated_svd(z.coeff, std::min(rank, z.rank()));
    const Matrix u = z.basis * svd.u;
    return u * u.transpose();
}

Matrix spectral_embed(const Matrix& a, Index k) {
    require(a.rows() == a.cols(), "spectral_embed: matrix must be square");
    require(k >= 1 && k <= a.cols(), "spectral_embed: k out of range");
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    require(asym <= 1e-8, "spectral_embed: input not symmetric");

    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (a + a.transpose()));
    if (eig.info() != Eigen::Success)
        throw numerical_error("spectral_embed: eigendecomposition failed");

    // Eigen returns ascending order; take the top k, descending.
    Matrix f(a.rows(), k);
    const Index n = a.cols();
    for (Index j = 0; j < k; ++j) f.col(j) = eig.eigenvectors().col(n - 1 - j);
    for (Index j = 0; j < k; ++j) {
        Index imax = 0;
        f.col(j).cwiseAbs().maxCoeff(&imax);
        if (f(imax, j) < 0) f.col(j) = -f.col(j);
    }
    return f;
}

namespace {

struct KmeansRun {
    std::vector<Index> labels;
    double wcss = std::numeric_limits<double>::infinity();
};

// Ascending scan, so equidistant centroids resolve to the lowest index.
Index nearest_centroid(const Matrix& points, const Matrix& centroids, Index row) {
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < centroids.rows(); ++c) {
        const double d = (points.row(row) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

KmeansRun lloyd_once(const Matrix& points, Index k, std::uint64_t seed) {
    const Index n = points.rows();
    Rng rng(seed);

    // k-means++ seeding
    Matrix centroids(k, points.cols());
    std::vector<double> dist2(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());
    Index first = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    centroids.row(0) = points.row(first);
    for (Index c = 1; c < k; ++c) {
        double total = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double d = (points.row(i) - centroids.row(c - 1)).squaredNorm();
            dist2[static_cast<std::size_t>(i)] =
                std::min(dist2[static_cast<std::size_t>(i)], d);
            total += dist2[static_cast<std::size_t>(i)];
        }
        Index pick = 0;
        if (total <= 0.0) {
            pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
        } else {
            double target = rng.uniform() * total;
            for (Index i = 0; i < n; ++i) {
                target -= dist2[static_cast<std::size_t>(i)];
                if (target <= 0.0) {
                    pick = i;
                    break;
                }
                pick = i;
            }
        }
        centroids.row(c) = points.row(pick);
    }

    KmeansRun run;
    run.labels.assign(static_cast<std::size_t>(n), 0);
    double prev_wcss = std::numeric_limits<double>::infinity();
    // Monotonicity slack: rounding noise when clusters collapse to points.
    const double slack = 1e-9 * (1.0 + points.squaredNorm());
    for (int iter = 0; iter < 200; ++iter) {
        bool changed = false;
        double wcss = 0.0;
        for (Index i = 0; i < n; ++i) {
            const Index c = nearest_centroid(points, centroids, i);
            wcss += (points.row(i) - centroids.row(c)).squaredNorm();
            if (run.labels[static_cast<std::size_t>(i)] != c) {
                run.labels[static_cast<std::size_t>(i)] = c;
                changed = true;
            }
        }
        if (wcss > prev_wcss + slack)
            throw numerical_error("kmeans: within-cluster sum of squares increased");
        prev_wcss = wcss;
        run.wcss = wcss;

        Matrix sums = Matrix::Zero(k, points.cols());
        std::vector<Index> counts(static_cast<std::size_t>(k), 0);
        for (Index i = 0; i < n; ++i) {
            sums.row(run.labels[static_cast<std::size_t>(i)]) += points.row(i);
            ++counts[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)])];
        }
        for (Index c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centroids.row(c) =
                    sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            } else {
                // Re-seed an emptied cluster from the farthest point.
                Index far = 0;
                double far_d = -1.0;
                for (Index i = 0; i < n; ++i) {
                    const double d =
                        (points.row(i) -
                         centroids.row(run.labels[static_cast<std::size_t>(i)]))
                            .squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centroids.row(c) = points.row(far);
                changed = true;
                prev_wcss = std::numeric_limits<double>::infinity();
            }
        }
        if (!changed) break;
    }
    return run;
}

}  // namespace

Labeling kmeans(const Matrix& points, Index k, std::uint64_t seed, int restarts) {
    require(k >= 1, "kmeans: k must be positive");
    require(restarts >= 1, "kmeans: restarts must be positive");
    const Index n = points.rows();
    require(k <= n, "kmeans: more clusters than points");

    // Distinct-point count gates feasibility.
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        for (Index j = 0; j < points.cols(); ++j) {
            if (points(a, j) != points(b, j)) return points(a, j) < points(b, j);
        }
        return false;
    });
    Index distinct = n == 0 ? 0 : 1;
    for (Index i = 1; i < n; ++i)
        if (points.row(order[static_cast<std::size_t>(i)]) !=
            points.row(order[static_cast<std::size_t>(i - 1)]))
            ++distinct;
    require(distinct >= k, "kmeans: fewer distinct points than clusters");

    std::vector<KmeansRun> runs(static_cast<std::size_t>(restarts));
    parallel_for(runs.size(), default_workers(), [&](std::size_t rix) {
        runs[rix] = lloyd_once(points, k,
                               derive_seed(seed, {static_cast<std::uint64_t>(rix)}));
    });

    std::size_t best = 0;
    for (std::size_t rix = 1; rix < runs.size(); ++rix)
        if (runs[rix].wcss < runs[best].wcss) best = rix;  // ties keep lowest index

    Labeling out;
    out.k = k;
    out.labels = std::move(runs[best].labels);
    return out;
}

AccuracyReport segmentation_accuracy(const Labeling& pred,
                                     const std::vector<Index>& truth) {
    require(!pred.labels.empty(), "segmentation_accuracy: empty labeling");
    require(pred.labels.size() == truth.size(),
            "segmentation_accuracy: length mismatch");

    Index num_classes = 0;
    for (Index t : truth) num_classes = std::max(num_classes, t + 1);

    AccuracyReport report;
    report.cluster_to_class.assign(static_cast<std::size_t>(pred.k), -1);
    for (Index c = 0; c < pred.k; ++c) {
        std::vector<Index> votes(static_cast<std::size_t>(num_classes), 0);
        bool any = false;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            if (pred.labels[i] == c) {
                ++votes[static_cast<std::size_t>(truth[i])];
                any = true;
            }
        }
        if (!any) continue;
        Index best = 0;
        for (Index cls = 1; cls < num_classes; ++cls)
            if (votes[static_cast<std::size_t>(cls)] > votes[static_cast<std::size_t>(best)])
                best = cls;  // ties keep the lowest class id
        report.cluster_to_class[static_cast<std::size_t>(c)] = best;
    }

    std::vector<Index> class_total(static_cast<std::size_t>(num_classes), 0);
    std::vector<Index> class_correct(static_cast<std::size_t>(num_classes), 0);
    Index correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++class_total[static_cast<std::size_t>(truth[i])];
        const Index mapped =
            report.cluster_to_class[static_cast<std::size_t>(pred.labels[i])];
        if (mapped == truth[i]) {
            ++correct;
            ++class_correct[static_cast<std::size_t>(truth[i])];
        }
    }
    report.overall_accuracy =
        static_cast<double>(correct) / static_cast<double>(truth.size());
    double recall_sum = 0.0;
    Index seen = 0;
    for (Index cls = 0; cls < num_classes; ++cls) {
        if (class_total[static_cast<std::size_t>(cls)] == 0) continue;
        recall_sum += static_cast<double>(class_correct[static_cast<std::size_t>(cls)]) /
                      static_cast<double>(class_total[static_cast<std::size_t>(cls)]);
        ++seen;
    }
    report.accuracy = seen ? recall_sum / static_cast<double>(seen) : 0.0;
    return report;
}

namespace {

Labeling pipeline_impl(const Matrix& affinity, Index k, const ClusterOptions& opts) {
    Matrix features;
    if (opts.mode == SpectralMode::kLaplacian) {
        Matrix w = affinity.cwiseAbs();
        w.diagonal().setZero();
        Vector deg = w.rowwise().sum();
        Vector scale = deg.unaryExpr([](double d) {
            return d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
        });
        const Matrix normalized = scale.asDiagonal() * w * scale.asDiagonal();
        const Index dim = opts.embed_dim > 0 ? opts.embed_dim : k;
        features = spectral_embed(normalized, std::min(dim, normalized.cols()));
    } else {
        const Index dim = opts.embed_dim > 0 ? opts.embed_dim : affinity.cols();
        features = spectral_embed(affinity, std::min(dim, affinity.cols()));
    }
    if (opts.row_normalize) {
        for (Index i = 0; i < features.rows(); ++i) {
            const double norm = features.row(i).norm();
            if (norm > 0) features.row(i) /= norm;
        }
    }
    return kmeans(features, k, opts.seed, opts.restarts);
}

}  // namespace

Labeling cluster_pipeline(const Matrix& z, Index k, const ClusterOptions& opts) {
    Index rank = opts.affinity_rank;
    if (rank <= 0) rank = compact_svd(z).rank();
    return pipeline_impl(affinity_from_z(z, rank), k, opts);
}

Labeling cluster_pipeline(const LowRankFactor& z, Index k, const ClusterOptions& opts) {
    Index rank = opts.affinity_rank;
    if (rank <= 0) rank = compact_svd(z.coeff).rank();
    return pipeline_impl(affinity_from_z(z, rank), k, opts);
}

}  // namespace dfclrr
