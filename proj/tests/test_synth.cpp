#include <doctest.h>

#include "dfclrr/linalg.hpp"
#include "dfclrr/synth.hpp"

using namespace dfclrr;

TEST_SUITE_BEGIN("synth");

TEST_CASE("gamma zero yields a clean permutation") {
    SynthConfig cfg;
    cfg.k = 2;
    cfg.m = 30;
    cfg.r = 3;
    cfg.n_s = 10;
    cfg.gamma = 0.0;
    cfg.seed = 1;
    const SynthDataset ds = gen_dataset(cfg);
    CHECK(ds.outlier_support.empty());
    CHECK(ds.n() == 20);
    CHECK(compact_svd(ds.m_matrix).rank() <= cfg.k * cfg.r);
}

TEST_CASE("single tiny subspace has rank one") {
    SynthConfig cfg;
    cfg.k = 1;
    cfg.m = 4;
    cfg.r = 1;
    cfg.n_s = 3;
    cfg.seed = 2;
    const SynthDataset ds = gen_dataset(cfg);
    CHECK(compact_svd(ds.clean_block()).rank() == 1);
}

TEST_CASE("desk-scale instance has exact rank k*r and independent subspaces") {
    SynthConfig cfg;
    cfg.k = 3;
    cfg.m = 300;
    cfg.r = 5;
    cfg.n_s = 100;
    cfg.gamma = 0.0;
    cfg.seed = 3;
    const SynthDataset ds = gen_dataset(cfg);
    CHECK(compact_svd(ds.clean_block()).rank() == 15);
    CHECK(subspace_independence_check(ds));
}

TEST_CASE("independence check detects duplicated bases") {
    SynthConfig cfg;
    cfg.k = 2;
    cfg.m = 20;
    cfg.r = 3;
    cfg.n_s = 8;
    cfg.seed = 4;
    SynthDataset ds = gen_dataset(cfg);
    REQUIRE(subspace_independence_check(ds));
    // Overwrite subspace 1 with a copy of subspace 0's columns.
    for (Index j = 0; j < cfg.n_s; ++j)
        ds.m_matrix.col(ds.clean_columns[static_cast<std::size_t>(cfg.n_s + j)]) =
            ds.m_matrix.col(ds.clean_columns[static_cast<std::size_t>(j)]);
    CHECK_FALSE(subspace_independence_check(ds));

    SynthConfig single = cfg;
    single.k = 1;
    CHECK(subspace_independence_check(gen_dataset(single)));  // vacuous
}

TEST_CASE("outlier count follows the rounding rule") {
    SynthConfig cfg;
    cfg.k = 3;
    cfg.n_s = 100;
    for (double gamma : {0.0, 0.02, 0.06, 0.1, 0.14, 0.25, 0.3}) {
        cfg.gamma = gamma;
        const Index expected = gamma == 0.0
                                   ? 0
                                   : static_cast<Index>(std::floor(
                                         gamma / (1.0 - gamma) * 300.0 + 0.5));
        CHECK(outlier_count(cfg) == expected);
    }

    cfg.m = 40;
    cfg.r = 2;
    cfg.n_s = 25;
    cfg.gamma = 0.1;
    cfg.seed = 5;
    const SynthDataset ds = gen_dataset(cfg);
    CHECK(static_cast<Index>(ds.outlier_support.size()) == outlier_count(cfg));
    CHECK(ds.n() == 75 + outlier_count(cfg));
}

TEST_CASE("sigma is the mean absolute clean entry") {
    SynthConfig cfg;
    cfg.k = 2;
    cfg.m = 50;
    cfg.r = 4;
    cfg.n_s = 30;
    cfg.gamma = 0.2;
    cfg.seed = 6;
    const SynthDataset ds = gen_dataset(cfg);
    CHECK(ds.sigma == doctest::Approx(ds.clean_block().cwiseAbs().mean()).epsilon(1e-12));
}

TEST_CASE("seed determinism and permutation bookkeeping") {
    SynthConfig cfg;
    cfg.k = 2;
    cfg.m = 25;
    cfg.r = 2;
    cfg.n_s = 12;
    cfg.gamma = 0.15;
    cfg.seed = 77;
    const SynthDataset a = gen_dataset(cfg);
    const SynthDataset b = gen_dataset(cfg);
    CHECK((a.m_matrix - b.m_matrix).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.clean_columns == b.clean_columns);
    CHECK(a.outlier_support == b.outlier_support);
    CHECK(a.labels == b.labels);

    cfg.seed = 78;
    const SynthDataset c = gen_dataset(cfg);
    CHECK((a.m_matrix - c.m_matrix).cwiseAbs().maxCoeff() > 0.0);

    // Clean and outlier positions partition the columns.
    std::vector<bool> seen(static_cast<std::size_t>(a.n()), false);
    for (Index j : a.clean_columns) {
        CHECK_FALSE(seen[static_cast<std::size_t>(j)]);
        seen[static_cast<std::size_t>(j)] = true;
    }
    for (Index j : a.outlier_support) {
        CHECK_FALSE(seen[static_cast<std::size_t>(j)]);
        seen[static_cast<std::size_t>(j)] = true;
    }
    for (bool s : seen) CHECK(s);

    // Un-permuting recovers the [clean outliers] concatenation exactly:
    // clean_block() is the clean half by construction, and l0 matches the
    // dataset on those positions.
    const Matrix l0 = a.l0();
    for (std::size_t j = 0; j < a.clean_columns.size(); ++j)
        CHECK((l0.col(a.clean_columns[j]) - a.m_matrix.col(a.clean_columns[j]))
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
}

TEST_CASE("parameter validation") {
    SynthConfig bad;
    bad.r = 10;
    bad.m = 5;
    CHECK_THROWS_AS(gen_dataset(bad), std::invalid_argument);
    SynthConfig gamma_bad;
    gamma_bad.gamma = 1.0;
    CHECK_THROWS_AS(gen_dataset(gamma_bad), std::invalid_argument);
}

TEST_SUITE_END();
