// Command-line entry point: dataset generation, solver runs, sweeps,
// clustering, and graph construction, all emitting machine-readable reports.
//
// Exit codes: 0 ok, 1 usage, 2 I/O, 3 numerical.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "dfclrr/dfc.hpp"
#include "dfclrr/graph.hpp"
#include "dfclrr/linalg.hpp"
#include "dfclrr/matrix_io.hpp"
#include "dfclrr/parallel.hpp"
#include "dfclrr/segmentation.hpp"
#include "dfclrr/serialize.hpp"
#include "dfclrr/sweep.hpp"
#include "dfclrr/synth.hpp"
#include "dfclrr/theory.hpp"

namespace {

using namespace dfclrr;

int log_level() {
    const char* env = std::getenv("DFC_LOG");
    return env ? std::atoi(env) : 0;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[dfclrr] " << msg << '\n';
}

std::string join_args(int argc, char** argv) {
    std::ostringstream out;
    for (int i = 0; i < argc; ++i) {
        if (i) out << ' ';
        out << argv[i];
    }
    return out.str();
}

std::string matrix_path(const std::string& prefix, const std::string& name,
                        const std::string& format) {
    const std::string ext = format == "csv" ? ".csv" : ".dfcm";
    return name.empty() ? prefix + ext : prefix + "_" + name + ext;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

std::vector<Index> parse_index_list(const std::string& csv) {
    std::vector<Index> out;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stoll(cell));
    return out;
}

std::vector<Index> read_label_csv(const std::string& path, Index n) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open " + path);
    std::vector<Index> labels(static_cast<std::size_t>(n), -1);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.rfind("node", 0) == 0) continue;
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        const Index node = std::stoll(cell);
        std::getline(ss, cell, ',');
        const Index cls = std::stoll(cell);
        if (node < 0 || node >= n) throw io_error(path + ": node id out of range");
        labels[static_cast<std::size_t>(node)] = cls;
    }
    return labels;
}

void write_label_csv(const std::string& path, const std::vector<Index>& labels) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open " + path + " for writing");
    out << "node_id,class_id\n";
    for (std::size_t i = 0; i < labels.size(); ++i)
        out << i << ',' << labels[i] << '\n';
    if (!out) throw io_error("write failed: " + path);
}

json adjacency_json(const SparseGraph& g) {
    json adj = json::array();
    for (Index i = 0; i < g.n; ++i) adj.push_back(json::object());
    for (const Edge& e : g.edges) {
        adj[static_cast<std::size_t>(e.i)][std::to_string(e.j)] = e.weight;
        if (g.symmetric) adj[static_cast<std::size_t>(e.j)][std::to_string(e.i)] = e.weight;
    }
    return json{{"n", g.n}, {"symmetric", g.symmetric}, {"adjacency", adj}};
}

struct DatasetFiles {
    Matrix m;
    SynthDataset meta;  // indices/labels/sigma/config re-read from the sidecar
};

DatasetFiles load_dataset(const std::string& prefix) {
    DatasetFiles out;
    std::string mpath = prefix + ".dfcm";
    if (!std::ifstream(mpath).good()) mpath = prefix + ".csv";
    out.m = read_matrix(mpath);
    std::ifstream side(prefix + ".json");
    if (!side) throw io_error("cannot open " + prefix + ".json");
    json doc = json::parse(side);
    const json& body = doc.at("body");
    out.meta.m_matrix = out.m;
    out.meta.sigma = body.at("sigma").get<double>();
    out.meta.clean_columns = body.at("clean_columns").get<std::vector<Index>>();
    out.meta.outlier_support = body.at("outlier_support").get<std::vector<Index>>();
    out.meta.labels = body.at("labels").get<std::vector<Index>>();
    const json& cfg = body.at("config");
    out.meta.config.k = cfg.at("k").get<Index>();
    out.meta.config.m = cfg.at("m").get<Index>();
    out.meta.config.r = cfg.at("r").get<Index>();
    out.meta.config.n_s = cfg.at("n_s").get<Index>();
    out.meta.config.gamma = cfg.at("gamma").get<double>();
    out.meta.config.seed = cfg.at("seed").get<std::uint64_t>();
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Divide-factor-combine low-rank representation toolkit"};
    app.require_subcommand(1);
    const std::string command_line = join_args(argc, argv);

    std::string input, out = "out", format = "dfcm";
    std::uint64_t seed = 0;
    double lambda = 0.0;  // 0 = auto (1/sqrt(max(m,n)))
    Index t = 4;
    unsigned threads = default_workers();
    double tol = 1e-8;
    int max_iter = 1000;
    double epsilon = 1e-4;

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    SynthConfig synth_cfg;
    synth_cmd->add_option("--k", synth_cfg.k);
    synth_cmd->add_option("--m", synth_cfg.m);
    synth_cmd->add_option("--r", synth_cfg.r);
    synth_cmd->add_option("--ns", synth_cfg.n_s);
    synth_cmd->add_option("--gamma", synth_cfg.gamma);
    synth_cmd->add_option("--seed", seed);
    synth_cmd->add_option("--out", out);
    synth_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "dfcm"}));

    // lrr
    auto* lrr_cmd = app.add_subcommand("lrr", "solve full LRR on a matrix");
    lrr_cmd->add_option("--input", input)->required();
    lrr_cmd->add_option("--lambda", lambda);
    lrr_cmd->add_option("--tol", tol);
    lrr_cmd->add_option("--max-iter", max_iter);
    lrr_cmd->add_option("--out", out);
    lrr_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "dfcm"}));

    // dfc
    auto* dfc_cmd = app.add_subcommand("dfc", "divide-factor-combine LRR");
    std::string lambda_scaling = "sqrt";
    std::size_t anchor = 0;
    dfc_cmd->add_option("--input", input)->required();
    dfc_cmd->add_option("--t", t);
    dfc_cmd->add_option("--lambda", lambda);
    dfc_cmd->add_option("--seed", seed);
    dfc_cmd->add_option("--threads", threads);
    dfc_cmd->add_option("--tol", tol);
    dfc_cmd->add_option("--max-iter", max_iter);
    dfc_cmd->add_option("--anchor", anchor);
    dfc_cmd->add_option("--lambda-scaling", lambda_scaling)
        ->check(CLI::IsMember({"sqrt", "none"}));
    dfc_cmd->add_option("--out", out);
    dfc_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "dfcm"}));

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "phase-transition harness");
    SweepSpec sweep_spec;
    std::string gammas_csv = "0.02,0.06,0.1,0.14,0.18,0.22,0.26,0.3";
    std::string ts_csv = "1,4,10";
    std::string lambda_arg = "auto";
    sweep_cmd->add_option("--k", sweep_spec.base.k);
    sweep_cmd->add_option("--m", sweep_spec.base.m);
    sweep_cmd->add_option("--r", sweep_spec.base.r);
    sweep_cmd->add_option("--ns", sweep_spec.base.n_s);
    sweep_cmd->add_option("--gammas", gammas_csv);
    sweep_cmd->add_option("--t", ts_csv);
    sweep_cmd->add_option("--trials", sweep_spec.trials);
    sweep_cmd->add_option("--lambda", lambda_arg, "numeric value or 'auto'");
    sweep_cmd->add_option("--epsilon", epsilon);
    sweep_cmd->add_option("--seed", seed);
    sweep_cmd->add_option("--threads", threads);
    sweep_cmd->add_option("--tol", tol);
    sweep_cmd->add_option("--max-iter", max_iter);
    sweep_cmd->add_option("--out", out);

    // cluster
    auto* cluster_cmd = app.add_subcommand("cluster", "spectral clustering of a representation");
    Index cluster_k = 2;
    Index affinity_rank = -1, embed_dim = -1;
    std::string mode = "laplacian", truth_path, basis_path, coeff_path;
    int restarts = 10;
    bool no_row_normalize = false;
    cluster_cmd->add_option("--input", input, "dense representation matrix");
    cluster_cmd->add_option("--basis", basis_path, "factored representation: basis");
    cluster_cmd->add_option("--coeff", coeff_path, "factored representation: coeff");
    cluster_cmd->add_option("--k", cluster_k)->required();
    cluster_cmd->add_option("--affinity-rank", affinity_rank);
    cluster_cmd->add_option("--embed-dim", embed_dim);
    cluster_cmd->add_option("--mode", mode)->check(CLI::IsMember({"laplacian", "projector"}));
    cluster_cmd->add_flag("--no-row-normalize", no_row_normalize);
    cluster_cmd->add_option("--restarts", restarts);
    cluster_cmd->add_option("--seed", seed);
    cluster_cmd->add_option("--truth", truth_path, "labels CSV for accuracy scoring");
    cluster_cmd->add_option("--out", out);

    // graph
    auto* graph_cmd = app.add_subcommand("graph", "graph construction");
    graph_cmd->require_subcommand(1);
    auto* knn_cmd = graph_cmd->add_subcommand("knn", "exponential-weight kNN graph");
    Index knn_k = 40;
    double knn_sigma = 0.0;
    knn_cmd->add_option("--input", input)->required();
    knn_cmd->add_option("--knn", knn_k);
    knn_cmd->add_option("--sigma", knn_sigma, "0 = median candidate-edge distance");
    knn_cmd->add_option("--out", out);

    SpgOptions spg_opts;
    std::string symmetrize = "max";
    auto* spg_cmd = graph_cmd->add_subcommand("spg", "non-negative lasso graph");
    spg_cmd->add_option("--input", input)->required();
    spg_cmd->add_option("--alpha", spg_opts.alpha);
    spg_cmd->add_option("--basis-size", spg_opts.n_k);
    spg_cmd->add_option("--max-iter", spg_opts.max_iters);
    spg_cmd->add_option("--tol", spg_opts.tol);
    spg_cmd->add_option("--symmetrize", symmetrize)->check(CLI::IsMember({"max", "mean"}));
    spg_cmd->add_option("--threads", threads);
    spg_cmd->add_option("--out", out);

    auto* slr_cmd = graph_cmd->add_subcommand("slr", "sparse low-rank graph");
    slr_cmd->add_option("--input", input)->required();
    slr_cmd->add_option("--basis", basis_path)->required();
    slr_cmd->add_option("--coeff", coeff_path)->required();
    slr_cmd->add_option("--alpha", spg_opts.alpha);
    slr_cmd->add_option("--basis-size", spg_opts.n_k);
    slr_cmd->add_option("--max-iter", spg_opts.max_iters);
    slr_cmd->add_option("--tol", spg_opts.tol);
    slr_cmd->add_option("--symmetrize", symmetrize)->check(CLI::IsMember({"max", "mean"}));
    slr_cmd->add_option("--threads", threads);
    slr_cmd->add_option("--out", out);

    // propagate
    auto* prop_cmd = app.add_subcommand("propagate", "harmonic label propagation");
    std::string graph_path, seeds_path;
    Index prop_n = 0;
    bool no_clamp = false;
    prop_cmd->add_option("--graph", graph_path)->required();
    prop_cmd->add_option("--n", prop_n)->required();
    prop_cmd->add_option("--labels", seeds_path)->required();
    prop_cmd->add_flag("--no-clamp", no_clamp);
    prop_cmd->add_option("--out", out);

    // theory
    auto* theory_cmd = app.add_subcommand("theory", "diagnostics for a synthetic dataset");
    std::string dataset_prefix;
    double delta = 0.05, bound_c = 2.0, bound_gamma = -1.0;
    theory_cmd->add_option("--dataset", dataset_prefix)->required();
    theory_cmd->add_option("--delta", delta);
    theory_cmd->add_option("--c", bound_c);
    theory_cmd->add_option("--gamma", bound_gamma, "defaults to the dataset's gamma");
    theory_cmd->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        SolverOptions solver;
        solver.tol_primal = tol;
        solver.max_iters = max_iter;

        if (*synth_cmd) {
            synth_cfg.seed = seed;
            const SynthDataset ds = gen_dataset(synth_cfg);
            write_matrix(matrix_path(out, "", format), ds.m_matrix);
            write_report(out + ".json", command_line, to_json(ds), json::object());
            write_label_csv(out + "_labels.csv", ds.labels_by_position());
            log_info("synth: wrote " + out + " (" + std::to_string(ds.n()) + " columns)");
        } else if (*lrr_cmd) {
            const Matrix m = read_matrix(input);
            const double lam = lambda > 0 ? lambda
                                          : default_lambda_practical(m.rows(), m.cols());
            const auto start = std::chrono::steady_clock::now();
            const LrrSolution sol = solve_lrr({m, m, lam}, solver);
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            write_matrix(matrix_path(out, "z", format), sol.z);
            write_matrix(matrix_path(out, "s", format), sol.s);
            json body = to_json(sol);
            body["lambda"] = lam;
            write_report(out + ".json", command_line, body,
                         json{{"solve_seconds", secs}});
        } else if (*dfc_cmd) {
            const Matrix m = read_matrix(input);
            const double lam = lambda > 0 ? lambda
                                          : default_lambda_practical(m.rows(), m.cols());
            DfcOptions opts;
            opts.solver = solver;
            opts.parallelism = threads;
            opts.anchor_index = anchor;
            opts.lambda_scaling = lambda_scaling == "none" ? LambdaScaling::kNone
                                                           : LambdaScaling::kSqrtRatio;
            const DfcResult res = dfc_lrr(m, t, lam, seed, opts);
            write_matrix(matrix_path(out, "basis", format), res.z_hat.basis);
            write_matrix(matrix_path(out, "coeff", format), res.z_hat.coeff);
            write_matrix(matrix_path(out, "s", format), res.s);
            json body = dfc_body_json(res);
            body["lambda"] = lam;
            write_report(out + ".json", command_line, body, dfc_timing_json(res));
        } else if (*sweep_cmd) {
            sweep_spec.gammas = parse_double_list(gammas_csv);
            sweep_spec.t_values = parse_index_list(ts_csv);
            sweep_spec.lambda = lambda_arg == "auto" ? 0.0 : std::stod(lambda_arg);
            sweep_spec.epsilon = epsilon;
            sweep_spec.master_seed = seed;
            sweep_spec.solver = solver;
            sweep_spec.threads = threads;
            const SweepReport report = run_sweep(sweep_spec);
            write_report(out + ".json", command_line, sweep_body_json(report),
                         sweep_timing_json(report));
            write_sweep_csv(out + ".csv", report);
            write_sweep_timing_csv(out + "_timing.csv", report);
        } else if (*cluster_cmd) {
            ClusterOptions opts;
            opts.affinity_rank = affinity_rank;
            opts.embed_dim = embed_dim;
            opts.mode = mode == "projector" ? SpectralMode::kProjector
                                            : SpectralMode::kLaplacian;
            opts.row_normalize = !no_row_normalize;
            opts.seed = seed;
            opts.restarts = restarts;
            Labeling labeling;
            Index n_cols = 0;
            if (!basis_path.empty() || !coeff_path.empty()) {
                if (basis_path.empty() || coeff_path.empty())
                    throw std::invalid_argument("cluster: need both --basis and --coeff");
                LowRankFactor z{read_matrix(basis_path), read_matrix(coeff_path)};
                n_cols = z.cols();
                labeling = cluster_pipeline(z, cluster_k, opts);
            } else if (!input.empty()) {
                const Matrix z = read_matrix(input);
                n_cols = z.cols();
                labeling = cluster_pipeline(z, cluster_k, opts);
            } else {
                throw std::invalid_argument("cluster: need --input or --basis/--coeff");
            }
            write_label_csv(out + "_labels.csv", labeling.labels);
            json body{{"k", labeling.k}, {"n", n_cols}};
            if (!truth_path.empty()) {
                const std::vector<Index> truth = read_label_csv(truth_path, n_cols);
                Labeling scored;
                scored.k = labeling.k;
                std::vector<Index> truth_kept;
                for (std::size_t i = 0; i < truth.size(); ++i) {
                    if (truth[i] >= 0) {  // -1 marks unlabeled columns
                        scored.labels.push_back(labeling.labels[i]);
                        truth_kept.push_back(truth[i]);
                    }
                }
                body["accuracy_report"] = to_json(segmentation_accuracy(scored, truth_kept));
            }
            write_report(out + ".json", command_line, body, json::object());
        } else if (*knn_cmd) {
            const Matrix m = read_matrix(input);
            const SparseGraph g = knn_graph(m, knn_k, knn_sigma);
            write_edge_csv(out + "_edges.csv", g);
            write_report(out + ".json", command_line, adjacency_json(g), json::object());
        } else if (*spg_cmd || *slr_cmd) {
            const Matrix m = read_matrix(input);
            const Symmetrize sym = symmetrize == "mean" ? Symmetrize::kMean
                                                        : Symmetrize::kMax;
            std::vector<bool> ok;
            SparseGraph g;
            if (*spg_cmd) {
                g = spg_graph(m, spg_opts, sym, threads, &ok);
            } else {
                LowRankFactor z{read_matrix(basis_path), read_matrix(coeff_path)};
                g = slr_graph(m, z, spg_opts, sym, threads, &ok);
            }
            write_edge_csv(out + "_edges.csv", g);
            json body = adjacency_json(g);
            json flagged = json::array();
            for (std::size_t i = 0; i < ok.size(); ++i)
                if (!ok[i]) flagged.push_back(i);
            body["non_converged_samples"] = flagged;
            write_report(out + ".json", command_line, body, json::object());
        } else if (*prop_cmd) {
            const SparseGraph g = read_edge_csv(graph_path, prop_n, true);
            const std::vector<Index> seeds = read_label_csv(seeds_path, prop_n);
            const PropagationResult res = label_propagate(g, seeds, !no_clamp);
            write_csv(out + "_scores.csv", res.scores);
            json flagged = json::array();
            for (std::size_t i = 0; i < res.unreachable.size(); ++i)
                if (res.unreachable[i]) flagged.push_back(i);
            write_report(out + ".json", command_line,
                         json{{"n", g.n},
                              {"num_classes", res.scores.cols()},
                              {"unreachable", flagged}},
                         json::object());
        } else if (*theory_cmd) {
            const DatasetFiles ds = load_dataset(dataset_prefix);
            const Matrix l0 = ds.meta.l0();
            const CoherenceResult coh = coherence(l0);
            TheoryParams params;
            params.rank_r = coh.rank;
            params.mu = coh.mu;
            params.beta = rwd_beta(ds.m, l0);
            params.gamma_star = gamma_star(params.beta, std::max(coh.mu, 1.0), coh.rank);
            json body = to_json(params);
            const double gamma_val =
                bound_gamma >= 0 ? bound_gamma : ds.meta.config.gamma;
            if (gamma_val < params.gamma_star) {
                body["sample_size_bound"] =
                    sample_size_bound(coh.rank, params.mu, ds.m.cols(), delta,
                                      gamma_val, params.gamma_star, bound_c);
            } else {
                body["sample_size_bound"] = nullptr;  // bound undefined here
            }
            body["bound_inputs"] = json{{"delta", delta},
                                        {"c", bound_c},
                                        {"gamma", gamma_val},
                                        {"n", ds.m.cols()}};
            write_report(out + ".json", command_line, body, json::object());
        }
    } catch (const io_error& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
