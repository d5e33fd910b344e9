#include "dfclrr/serialize.hpp"

#include <fstream>

namespace dfclrr {

json to_json(const SynthConfig& cfg) {
    return json{{"k", cfg.k},     {"m", cfg.m},         {"r", cfg.r},
                {"n_s", cfg.n_s}, {"gamma", cfg.gamma}, {"seed", cfg.seed}};
}

json to_json(const SynthDataset& ds) {
    return json{{"config", to_json(ds.config)},
                {"n", ds.n()},
                {"sigma", ds.sigma},
                {"clean_columns", ds.clean_columns},
                {"outlier_support", ds.outlier_support},
                {"labels", ds.labels}};
}

json to_json(const LrrSolution& sol) {
    return json{{"iterations", sol.iterations},
                {"primal_residual", sol.primal_residual},
                {"objective", sol.objective},
                {"converged", sol.converged}};
}

json to_json(const RecoveryReport& rec) {
    return json{{"rowspace_residual", rec.rowspace_residual},
                {"support_residual", rec.support_residual},
                {"success", rec.success},
                {"tolerance", rec.tolerance}};
}

json to_json(const TheoryParams& params) {
    return json{{"rank_r", params.rank_r},
                {"mu", params.mu},
                {"beta", params.beta},
                {"gamma_star", params.gamma_star}};
}

json to_json(const AccuracyReport& acc) {
    return json{{"accuracy", acc.accuracy},
                {"overall_accuracy", acc.overall_accuracy},
                {"cluster_to_class", acc.cluster_to_class}};
}

json to_json(const PartitionPlan& plan) {
    return json{{"n", plan.n}, {"seed", plan.seed}, {"blocks", plan.blocks}};
}

json dfc_body_json(const DfcResult& res) {
    json blocks = json::array();
    for (const auto& diag : res.block_diagnostics) {
        blocks.push_back(json{{"columns", diag.columns},
                              {"objective", diag.objective},
                              {"primal_residual", diag.primal_residual},
                              {"iterations", diag.iterations},
                              {"converged", diag.converged},
                              {"rank", diag.rank}});
    }
    return json{{"rank", res.z_hat.rank()},
                {"partition", to_json(res.plan)},
                {"blocks", blocks}};
}

json dfc_timing_json(const DfcResult& res) {
    json times = json::array();
    for (const auto& diag : res.block_diagnostics) times.push_back(diag.solve_seconds);
    return json{{"block_seconds", times},
                {"max_block_seconds", res.max_block_seconds},
                {"combine_seconds", res.combine_seconds},
                {"reported_seconds", res.reported_seconds()}};
}

json sweep_body_json(const SweepReport& report) {
    const SweepSpec& spec = report.spec;
    json cells = json::array();
    for (const SweepCell& cell : report.cells) {
        cells.push_back(json{{"gamma", spec.gammas[cell.gamma_index]},
                             {"t", spec.t_values[cell.t_index]},
                             {"trial", cell.trial},
                             {"seed", cell.seed},
                             {"n", cell.n},
                             {"n_outliers", cell.n_outliers},
                             {"lambda", cell.lambda},
                             {"success", cell.success},
                             {"rowspace_residual", cell.rowspace_residual},
                             {"support_residual", cell.support_residual},
                             {"iterations", cell.iterations},
                             {"converged", cell.converged},
                             {"rank_estimate", cell.rank_estimate}});
    }
    json aggregates = json::array();
    for (const SweepAggregate& agg : report.aggregates) {
        aggregates.push_back(json{{"gamma", spec.gammas[agg.gamma_index]},
                                  {"t", spec.t_values[agg.t_index]},
                                  {"success_rate", agg.success_rate}});
    }
    return json{{"base", to_json(spec.base)},
                {"gammas", spec.gammas},
                {"t_values", spec.t_values},
                {"trials", spec.trials},
                {"epsilon", spec.epsilon},
                {"master_seed", spec.master_seed},
                {"cells", cells},
                {"aggregates", aggregates}};
}

json sweep_timing_json(const SweepReport& report) {
    json cells = json::array();
    for (const SweepCell& cell : report.cells) cells.push_back(cell.wall_seconds);
    json means = json::array();
    for (const SweepAggregate& agg : report.aggregates) means.push_back(agg.mean_seconds);
    return json{{"cell_seconds", cells}, {"aggregate_mean_seconds", means}};
}

void write_report(const std::string& path, const std::string& command,
                  const json& body, const json& timing) {
    json envelope{{"schema_version", 1},
                  {"command", command},
                  {"body", body},
                  {"timing", timing}};
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << envelope.dump(2) << '\n';
    if (!out) throw io_error("write failed: " + path);
}

void write_sweep_csv(const std::string& path, const SweepReport& report) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out.precision(17);
    const SweepSpec& spec = report.spec;
    out << "gamma,t,trial,seed,n,n_outliers,lambda,success,rowspace_residual,"
           "support_residual,iterations,converged,rank_estimate\n";
    for (const SweepCell& cell : report.cells) {
        out << spec.gammas[cell.gamma_index] << ',' << spec.t_values[cell.t_index]
            << ',' << cell.trial << ',' << cell.seed << ',' << cell.n << ','
            << cell.n_outliers << ',' << cell.lambda << ',' << (cell.success ? 1 : 0)
            << ',' << cell.rowspace_residual << ',' << cell.support_residual << ','
            << cell.iterations << ',' << (cell.converged ? 1 : 0) << ','
            << cell.rank_estimate << '\n';
    }
    out << "aggregate_gamma,t,success_rate\n";
    for (const SweepAggregate& agg : report.aggregates)
        out << spec.gammas[agg.gamma_index] << ',' << spec.t_values[agg.t_index]
            << ',' << agg.success_rate << '\n';
    if (!out) throw io_error("write failed: " + path);
}

void write_sweep_timing_csv(const std::string& path, const SweepReport& report) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out.precision(17);
    const SweepSpec& spec = report.spec;
    out << "gamma,t,trial,wall_seconds\n";
    for (const SweepCell& cell : report.cells)
        out << spec.gammas[cell.gamma_index] << ',' << spec.t_values[cell.t_index]
            << ',' << cell.trial << ',' << cell.wall_seconds << '\n';
    out << "aggregate_gamma,t,mean_seconds\n";
    for (const SweepAggregate& agg : report.aggregates)
        out << spec.gammas[agg.gamma_index] << ',' << spec.t_values[agg.t_index]
            << ',' << agg.mean_seconds << '\n';
    if (!out) throw io_error("write failed: " + path);
}

}  // namespace dfclrr
