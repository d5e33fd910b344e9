#include "dfclrr/sweep.hpp"

#include <chrono>

#include "dfclrr/dfc.hpp"
#include "dfclrr/parallel.hpp"
#include "dfclrr/rng.hpp"
#include "dfclrr/theory.hpp"

namespace dfclrr {

SweepReport run_sweep(const SweepSpec& spec) {
    require(!spec.gammas.empty() && !spec.t_values.empty(), "run_sweep: empty grid");
    require(spec.trials >= 1, "run_sweep: trials must be >= 1");

    SweepReport report;
    report.spec = spec;
    const std::size_t cell_count =
        spec.gammas.size() * spec.t_values.size() * static_cast<std::size_t>(spec.trials);
    report.cells.resize(cell_count);

    parallel_for(cell_count, spec.threads, [&](std::size_t flat) {
        const std::size_t per_gamma =
            spec.t_values.size() * static_cast<std::size_t>(spec.trials);
        const std::size_t gi = flat / per_gamma;
        const std::size_t ti = (flat % per_gamma) / static_cast<std::size_t>(spec.trials);
        const int trial = static_cast<int>(flat % static_cast<std::size_t>(spec.trials));

        SweepCell& cell = report.cells[flat];
        cell.gamma_index = gi;
        cell.t_index = ti;
        cell.trial = trial;
        cell.seed = derive_seed(spec.master_seed,
                                {static_cast<std::uint64_t>(gi),
                                 static_cast<std::uint64_t>(ti),
                                 static_cast<std::uint64_t>(trial)});

        SynthConfig cfg = spec.base;
        cfg.gamma = spec.gammas[gi];
        cfg.seed = cell.seed;
        const SynthDataset data = gen_dataset(cfg);
        cell.n = data.n();
        cell.n_outliers = static_cast<Index>(data.outlier_support.size());
        cell.lambda = spec.lambda > 0
                          ? spec.lambda
                          : default_lambda_practical(cfg.m, data.n());

        const Matrix l0 = data.l0();
        const Index t = spec.t_values[ti];
        try {
            if (t <= 1) {
                const auto start = std::chrono::steady_clock::now();
                LrrSolution sol =
                    solve_lrr({data.m_matrix, data.m_matrix, cell.lambda}, spec.solver);
                cell.wall_seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                        .count();
                cell.iterations = sol.iterations;
                cell.converged = sol.converged;
                cell.rank_estimate =
                    sol.z.isZero(0.0) ? 0 : compact_svd(sol.z).rank();
                RecoveryReport rec = check_recovery(sol.z, l0, data.outlier_support,
                                                    sol.s, spec.epsilon);
                cell.success = rec.success;
                cell.rowspace_residual = rec.rowspace_residual;
                cell.support_residual = rec.support_residual;
            } else {
                DfcOptions dopts;
                dopts.solver = spec.solver;
                dopts.parallelism = 1;  // sweep-level parallelism owns the budget
                DfcResult res = dfc_lrr(data.m_matrix, t, cell.lambda, cell.seed, dopts);
                cell.wall_seconds = res.reported_seconds();
                cell.converged = true;
                for (const auto& diag : res.block_diagnostics) {
                    cell.iterations = std::max(cell.iterations, diag.iterations);
                    cell.converged = cell.converged && diag.converged;
                }
                cell.rank_estimate = res.z_hat.rank();
                RecoveryReport rec = check_recovery(res.z_hat, l0, data.outlier_support,
                                                    res.s, spec.epsilon);
                cell.success = rec.success;
                cell.rowspace_residual = rec.rowspace_residual;
                cell.support_residual = rec.support_residual;
            }
        } catch (const numerical_error&) {
            cell.success = false;
            cell.converged = false;
        }
    });

    for (std::size_t gi = 0; gi < spec.gammas.size(); ++gi) {
        for (std::size_t ti = 0; ti < spec.t_values.size(); ++ti) {
            SweepAggregate agg;
            agg.gamma_index = gi;
            agg.t_index = ti;
            for (int trial = 0; trial < spec.trials; ++trial) {
                const std::size_t flat =
                    (gi * spec.t_values.size() + ti) * static_cast<std::size_t>(spec.trials) +
                    static_cast<std::size_t>(trial);
                agg.success_rate += report.cells[flat].success ? 1.0 : 0.0;
                agg.mean_seconds += report.cells[flat].wall_seconds;
            }
            agg.success_rate /= spec.trials;
            agg.mean_seconds /= spec.trials;
            report.aggregates.push_back(agg);
        }
    }
    return report;
}

}  // namespace dfclrr
