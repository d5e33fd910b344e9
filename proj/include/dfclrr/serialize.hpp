#pragma once

#include <string>

#include <json.hpp>

#include "dfclrr/dfc.hpp"
#include "dfclrr/graph.hpp"
#include "dfclrr/segmentation.hpp"
#include "dfclrr/sweep.hpp"
#include "dfclrr/synth.hpp"
#include "dfclrr/theory.hpp"

namespace dfclrr {

using json = nlohmann::ordered_json;

json to_json(const SynthConfig& cfg);
json to_json(const SynthDataset& ds);  // sidecar: indices, labels, sigma, config
json to_json(const LrrSolution& sol);
json to_json(const RecoveryReport& rec);
json to_json(const TheoryParams& params);
json to_json(const AccuracyReport& acc);
json to_json(const PartitionPlan& plan);

/// DFC diagnostics; wall times go to the timing object, not the body.
json dfc_body_json(const DfcResult& res);
json dfc_timing_json(const DfcResult& res);

json sweep_body_json(const SweepReport& report);
json sweep_timing_json(const SweepReport& report);

/// Report envelope. `body` is deterministic for a fixed command and seed;
/// `timing` is measurement and may vary run to run.
void write_report(const std::string& path, const std::string& command,
                  const json& body, const json& timing);

/// Deterministic sweep CSV (per-cell rows plus aggregate block) and its
/// timing sidecar.
void write_sweep_csv(const std::string& path, const SweepReport& report);
void write_sweep_timing_csv(const std::string& path, const SweepReport& report);

}  // namespace dfclrr
