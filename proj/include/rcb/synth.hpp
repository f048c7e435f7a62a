#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcb/core_model.hpp"

namespace rcb {

// Fully explicit synthetic specification: one true probability per item and
// model. Helper constructors build the vectors from compact recipes.
struct SynthSpec {
    int n_items = 0;
    int k = 10;
    std::uint64_t seed = 0;
    std::string model_id_v1 = "v1";
    std::string model_id_v2 = "v2";
    std::vector<double> q_v1;  // size n_items
    std::vector<double> q_v2;
    std::vector<std::string> domains;  // empty, or size n_items
};

struct GroundTruthItem {
    std::string item_id;
    double q_v1 = 0.0;
    double q_v2 = 0.0;
    double true_delta = 0.0;
    bool true_floor_ceiling = false;  // both q exactly 0 or both exactly 1
};

struct GroundTruth {
    std::vector<GroundTruthItem> items;
};

struct SynthResult {
    TrialSet trials_v1;
    TrialSet trials_v2;
    GroundTruth truth;
};

// q_v1 on a uniform grid over [lo, hi], q_v2 = clamp(q_v1 + shift), with
// optional mass pinned to the exact floor/ceiling values. Deterministic from
// the spec's seed.
SynthSpec make_grid_spec(int n_items, int k, std::uint64_t seed, double lo = 0.0, double hi = 1.0,
                         double shift = 0.0, double floor_mass = 0.0, double ceiling_mass = 0.0,
                         const std::vector<std::string>& domain_cycle = {});

// Each sample is an independent Bernoulli(q) draw from a stream keyed by
// (item id, model, sample); adding items never perturbs existing draws.
SynthResult generate_pair(const SynthSpec& spec);

// JSON (de)serialisation of specs, for the simulate subcommand.
SynthSpec parse_synth_spec_file(const std::string& path);
void write_ground_truth_json(const GroundTruth& truth, const std::string& path);

}  // namespace rcb
