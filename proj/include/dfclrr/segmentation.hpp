#pragma once

#include <cstdint>
#include <vector>

#include "dfclrr/types.hpp"

namespace dfclrr {

/// Projector affinity U U^T from the top-`rank` left singular vectors of z.
/// If z's numerical rank is below `rank`, the available factors are used.
Matrix affinity_from_z(const Matrix& z, Index rank);
Matrix affinity_from_z(const LowRankFactor& z, Index rank);

/// Top-k eigenvectors (descending eigenvalue) of a symmetric matrix,
/// returned as columns; rows serve as features. Column signs are fixed.
Matrix spectral_embed(const Matrix& a, Index k);

struct Labeling {
    std::vector<Index> labels;
    Index k = 0;
};

/// Lloyd's algorithm on the rows of `points`, k-means++ seeding, best of
/// `restarts` runs by within-cluster sum of squares. Ties in assignment go
/// to the lowest cluster index; an emptied cluster re-seeds from the point
/// farthest from its centroid. Deterministic given seed.
Labeling kmeans(const Matrix& points, Index k, std::uint64_t seed, int restarts = 10);

struct AccuracyReport {
    double accuracy = 0.0;          // per-class recall averaged over classes
    double overall_accuracy = 0.0;  // plain fraction correct
    std::vector<Index> cluster_to_class;
};

/// Majority-vote scoring: each predicted cluster is assigned the majority
/// true class (ties -> lowest class id).
AccuracyReport segmentation_accuracy(const Labeling& pred,
                                     const std::vector<Index>& truth);

enum class SpectralMode {
    kProjector,  // embed the affinity's own top eigenvectors
    kLaplacian,  // symmetric normalized Laplacian of |A| with zeroed diagonal
};

struct ClusterOptions {
    Index affinity_rank = -1;  // <0: numerical rank of z
    Index embed_dim = -1;      // <0: k for Laplacian mode, affinity rank otherwise
    SpectralMode mode = SpectralMode::kLaplacian;
    bool row_normalize = true;
    std::uint64_t seed = 0;
    int restarts = 10;
};

/// affinity -> spectral embedding -> k-means over all columns of z.
Labeling cluster_pipeline(const Matrix& z, Index k, const ClusterOptions& opts = {});
Labeling cluster_pipeline(const LowRankFactor& z, Index k,
                          const ClusterOptions& opts = {});

}  // namespace dfclrr
