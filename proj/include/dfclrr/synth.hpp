#pragma once

#include <cstdint>
#include <vector>

#include "dfclrr/types.hpp"

namespace dfclrr {

struct SynthConfig {
    Index k = 3;        // subspace count
    Index m = 300;      // ambient dimension
    Index r = 5;        // rank per subspace
    Index n_s = 100;    // points per subspace
    double gamma = 0.0; // outlier column fraction
    std::uint64_t seed = 0;
};

struct SynthDataset {
    Matrix m_matrix;                   // m x n
    std::vector<Index> clean_columns;  // position in m_matrix of clean column j
    std::vector<Index> outlier_support;
    std::vector<Index> labels;         // subspace id of clean column j
    double sigma = 0.0;                // outlier noise scale used
    SynthConfig config;

    Index n() const { return m_matrix.cols(); }
    /// Clean matrix at full width: clean columns in place, zeros elsewhere.
    Matrix l0() const;
    /// Clean columns only, in generation order (subspace blocks).
    Matrix clean_block() const;
    /// Subspace id per m_matrix column; -1 for outlier columns.
    std::vector<Index> labels_by_position() const;
};

/// Number of outlier columns: round(gamma/(1-gamma) * k * n_s), ties up.
Index outlier_count(const SynthConfig& cfg);

/// Draws k independent subspaces (Haar bases via QR of Gaussian draws),
/// uniform [0,1] coefficients, Gaussian outlier columns scaled to the mean
/// absolute clean entry, then permutes columns. Deterministic given seed.
SynthDataset gen_dataset(const SynthConfig& cfg);

/// True iff the rank of the concatenated per-subspace blocks equals the sum
/// of the per-subspace ranks.
bool subspace_independence_check(const SynthDataset& dataset);

}  // namespace dfclrr
