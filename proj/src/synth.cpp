#include "dfclrr/synth.hpp"

#include <Eigen/QR>
#include <cmath>

#include "dfclrr/linalg.hpp"
#include "dfclrr/rng.hpp"

namespace dfclrr {

Matrix SynthDataset::l0() const {
    Matrix out = Matrix::Zero(m_matrix.rows(), m_matrix.cols());
    for (Index pos : clean_columns) out.col(pos) = m_matrix.col(pos);
    return out;
}

Matrix SynthDataset::clean_block() const {
    Matrix out(m_matrix.rows(), static_cast<Index>(clean_columns.size()));
    for (std::size_t j = 0; j < clean_columns.size(); ++j)
        out.col(static_cast<Index>(j)) = m_matrix.col(clean_columns[j]);
    return out;
}

std::vector<Index> SynthDataset::labels_by_position() const {
    std::vector<Index> out(static_cast<std::size_t>(n()), -1);
    for (std::size_t j = 0; j < clean_columns.size(); ++j)
        out[static_cast<std::size_t>(clean_columns[j])] = labels[j];
    return out;
}

Index outlier_count(const SynthConfig& cfg) {
    if (cfg.gamma == 0.0) return 0;
    const double ratio = cfg.gamma / (1.0 - cfg.gamma) *
                         static_cast<double>(cfg.k * cfg.n_s);
    return static_cast<Index>(std::floor(ratio + 0.5));
}

SynthDataset gen_dataset(const SynthConfig& cfg) {
    require(cfg.k >= 1 && cfg.m >= 1 && cfg.r >= 1 && cfg.n_s >= 1,
            "gen_dataset: counts must be positive");
    require(cfg.r <= cfg.m, "gen_dataset: r must not exceed m");
    require(cfg.gamma >= 0.0 && cfg.gamma < 1.0, "gen_dataset: gamma in [0,1)");

    Rng rng(cfg.seed);
    const Index n_clean = cfg.k * cfg.n_s;

    // Entries are always drawn column-major so datasets are reproducible
    // from the documented stream order.
    Matrix clean(cfg.m, n_clean);
    std::vector<Index> labels(static_cast<std::size_t>(n_clean));
    for (Index i = 0; i < cfg.k; ++i) {
        Matrix gauss(cfg.m, cfg.r);
        for (Index c = 0; c < cfg.r; ++c)
            for (Index rrow = 0; rrow < cfg.m; ++rrow) gauss(rrow, c) = rng.normal();
        Eigen::HouseholderQR<Matrix> qr(gauss);
        Matrix basis = qr.householderQ() * Matrix::Identity(cfg.m, cfg.r);
        const Matrix rfac = qr.matrixQR().topRows(cfg.r).triangularView<Eigen::Upper>();
        for (Index c = 0; c < cfg.r; ++c)
            if (rfac(c, c) < 0) basis.col(c) = -basis.col(c);  // Haar sign fix

        Matrix coeff(cfg.r, cfg.n_s);
        for (Index c = 0; c < cfg.n_s; ++c)
            for (Index rrow = 0; rrow < cfg.r; ++rrow) coeff(rrow, c) = rng.uniform();

        clean.middleCols(i * cfg.n_s, cfg.n_s) = basis * coeff;
        for (Index c = 0; c < cfg.n_s; ++c)
            labels[static_cast<std::size_t>(i * cfg.n_s + c)] = i;
    }

    const double sigma = clean.cwiseAbs().mean();
    const Index n_out = outlier_count(cfg);
    Matrix outliers(cfg.m, n_out);
    for (Index c = 0; c < n_out; ++c)
        for (Index rrow = 0; rrow < cfg.m; ++rrow)
            outliers(rrow, c) = sigma * rng.normal();

    const Index n = n_clean + n_out;
    std::vector<std::size_t> perm = rng.permutation(static_cast<std::size_t>(n));
    // perm[j] = destination of pre-permutation column j in m_matrix.

    SynthDataset ds;
    ds.config = cfg;
    ds.sigma = sigma;
    ds.labels = std::move(labels);
    ds.m_matrix.resize(cfg.m, n);
    ds.clean_columns.resize(static_cast<std::size_t>(n_clean));
    ds.outlier_support.resize(static_cast<std::size_t>(n_out));
    for (Index j = 0; j < n_clean; ++j) {
        const Index dest = static_cast<Index>(perm[static_cast<std::size_t>(j)]);
        ds.m_matrix.col(dest) = clean.col(j);
        ds.clean_columns[static_cast<std::size_t>(j)] = dest;
    }
    for (Index j = 0; j < n_out; ++j) {
        const Index dest = static_cast<Index>(perm[static_cast<std::size_t>(n_clean + j)]);
        ds.m_matrix.col(dest) = outliers.col(j);
        ds.outlier_support[static_cast<std::size_t>(j)] = dest;
    }
    return ds;
}

bool subspace_independence_check(const SynthDataset& dataset) {
    const SynthConfig& cfg = dataset.config;
    if (cfg.k <= 1) return true;
    const Matrix clean = dataset.clean_block();
    Index rank_sum = 0;
    for (Index i = 0; i < cfg.k; ++i) {
        CompactSvd svd = compact_svd(clean.middleCols(i * cfg.n_s, cfg.n_s));
        rank_sum += svd.rank();
    }
    CompactSvd whole = compact_svd(clean);
    return whole.rank() == rank_sum;
}

}  // namespace dfclrr
