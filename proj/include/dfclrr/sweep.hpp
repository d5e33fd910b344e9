#pragma once

#include <cstdint>
#include <vector>

#include "dfclrr/lrr.hpp"
#include "dfclrr/synth.hpp"
#include "dfclrr/types.hpp"

namespace dfclrr {

struct SweepSpec {
    SynthConfig base;             // gamma and seed fields are overridden per cell
    std::vector<double> gammas;
    std::vector<Index> t_values;  // 1 = full LRR
    int trials = 10;
    double lambda = 0.0;          // <= 0: 1/sqrt(max(m,n)) per instance
    double epsilon = 1e-4;
    std::uint64_t master_seed = 0;
    SolverOptions solver;
    unsigned threads = 1;
};

struct SweepCell {
    std::size_t gamma_index = 0;
    std::size_t t_index = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    Index n = 0;
    Index n_outliers = 0;
    double lambda = 0.0;
    bool success = false;
    double rowspace_residual = 0.0;
    double support_residual = 0.0;
    int iterations = 0;       // max over blocks for t > 1
    bool converged = false;   // all blocks converged for t > 1
    Index rank_estimate = 0;
    double wall_seconds = 0.0;  // longest block + combine for t > 1
};

struct SweepAggregate {
    std::size_t gamma_index = 0;
    std::size_t t_index = 0;
    double success_rate = 0.0;
    double mean_seconds = 0.0;
};

struct SweepReport {
    SweepSpec spec;
    std::vector<SweepCell> cells;          // ordered by (gamma, t, trial)
    std::vector<SweepAggregate> aggregates;
};

/// Runs every (gamma, t, trial) cell: generate dataset, solve (full LRR for
/// t=1, DFC otherwise), check the oracle constraints. Cell seeds derive from
/// (master_seed, gamma index, t index, trial). Failures of individual trials
/// are recorded, not fatal.
SweepReport run_sweep(const SweepSpec& spec);

}  // namespace dfclrr
