#include "rcb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "rcb/errors.hpp"
#include "rcb/rng.hpp"

namespace rcb {

namespace {

std::string item_name(int index) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "item_%05d", index);
    return buf;
}

void check_spec(const SynthSpec& spec) {
    if (spec.n_items < 0 || spec.k < 2) throw ValidationError("synth spec: need n_items >= 0, K >= 2");
    if (spec.q_v1.size() != static_cast<std::size_t>(spec.n_items) ||
        spec.q_v2.size() != static_cast<std::size_t>(spec.n_items)) {
        throw ValidationError("synth spec: q vectors must have n_items entries");
    }
    if (!spec.domains.empty() && spec.domains.size() != static_cast<std::size_t>(spec.n_items)) {
        throw ValidationError("synth spec: domains must be empty or have n_items entries");
    }
    for (double q : spec.q_v1) {
        if (q < 0.0 || q > 1.0) throw ValidationError("synth spec: q outside [0, 1]");
    }
    for (double q : spec.q_v2) {
        if (q < 0.0 || q > 1.0) throw ValidationError("synth spec: q outside [0, 1]");
    }
}

}  // namespace

SynthSpec make_grid_spec(int n_items, int k, std::uint64_t seed, double lo, double hi,
                         double shift, double floor_mass, double ceiling_mass,
                         const std::vector<std::string>& domain_cycle) {
    if (n_items < 1 || k < 2) throw ValidationError("grid spec: need n_items >= 1, K >= 2");
    if (lo < 0.0 || hi > 1.0 || lo > hi) throw ValidationError("grid spec: need 0 <= lo <= hi <= 1");
    if (floor_mass < 0.0 || ceiling_mass < 0.0 || floor_mass + ceiling_mass > 1.0) {
        throw ValidationError("grid spec: floor/ceiling masses must be non-negative, sum <= 1");
    }
    SynthSpec spec;
    spec.n_items = n_items;
    spec.k = k;
    spec.seed = seed;
    const int n_floor = static_cast<int>(std::lround(floor_mass * n_items));
    const int n_ceiling = static_cast<int>(std::lround(ceiling_mass * n_items));
    for (int i = 0; i < n_items; ++i) {
        double q;
        if (i < n_floor) {
            q = 0.0;
        } else if (i >= n_items - n_ceiling) {
            q = 1.0;
        } else if (n_items == 1) {
            q = 0.5 * (lo + hi);
        } else {
            q = lo + (hi - lo) * static_cast<double>(i) / (n_items - 1);
        }
        spec.q_v1.push_back(q);
        spec.q_v2.push_back(std::clamp(q + shift, 0.0, 1.0));
        if (!domain_cycle.empty()) {
            spec.domains.push_back(domain_cycle[static_cast<std::size_t>(i) % domain_cycle.size()]);
        }
    }
    return spec;
}

SynthResult generate_pair(const SynthSpec& spec) {
    check_spec(spec);
    SynthResult res;
    res.trials_v1.model_id = spec.model_id_v1;
    res.trials_v2.model_id = spec.model_id_v2;
    res.trials_v1.k = spec.k;
    res.trials_v2.k = spec.k;

    const std::uint64_t base = mix_seed(spec.seed, seed_label::synthesis);
    for (int i = 0; i < spec.n_items; ++i) {
        const std::string id = item_name(i);
        const std::string domain =
            spec.domains.empty() ? std::string{} : spec.domains[static_cast<std::size_t>(i)];
        const std::uint64_t item_seed = mix_seed(base, hash_string(id));
        for (int model = 0; model < 2; ++model) {
            const double q = model == 0 ? spec.q_v1[static_cast<std::size_t>(i)]
                                        : spec.q_v2[static_cast<std::size_t>(i)];
            ItemTrials item;
            item.item_id = id;
            item.domain = domain;
            item.slots.resize(static_cast<std::size_t>(spec.k));
            const std::uint64_t model_seed = mix_seed(item_seed, static_cast<std::uint64_t>(model));
            for (int s = 0; s < spec.k; ++s) {
                Rng rng(mix_seed(model_seed, static_cast<std::uint64_t>(s)));
                item.slots[static_cast<std::size_t>(s)].correct = rng.next_double() < q;
                item.slots[static_cast<std::size_t>(s)].valid = true;
            }
            (model == 0 ? res.trials_v1 : res.trials_v2).items.push_back(std::move(item));
        }
        GroundTruthItem gt;
        gt.item_id = id;
        gt.q_v1 = spec.q_v1[static_cast<std::size_t>(i)];
        gt.q_v2 = spec.q_v2[static_cast<std::size_t>(i)];
        gt.true_delta = gt.q_v2 - gt.q_v1;
        gt.true_floor_ceiling = (gt.q_v1 == 0.0 && gt.q_v2 == 0.0) ||
                                (gt.q_v1 == 1.0 && gt.q_v2 == 1.0);
        res.truth.items.push_back(std::move(gt));
    }
    return res;
}

SynthSpec parse_synth_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open synth spec: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    try {
        const int n_items = j.at("n_items").get<int>();
        const int k = j.value("k", 10);
        const std::uint64_t seed = j.value("seed", 0ull);
        SynthSpec spec;
        if (j.contains("recipe")) {
            const auto& r = j["recipe"];
            spec = make_grid_spec(n_items, k, seed, r.value("lo", 0.0), r.value("hi", 1.0),
                                  r.value("shift", 0.0), r.value("floor_mass", 0.0),
                                  r.value("ceiling_mass", 0.0),
                                  r.value("domain_cycle", std::vector<std::string>{}));
        } else {
            spec.n_items = n_items;
            spec.k = k;
            spec.seed = seed;
            spec.q_v1 = j.at("q_v1").get<std::vector<double>>();
            spec.q_v2 = j.at("q_v2").get<std::vector<double>>();
            spec.domains = j.value("domains", std::vector<std::string>{});
        }
        spec.model_id_v1 = j.value("model_id_v1", std::string("v1"));
        spec.model_id_v2 = j.value("model_id_v2", std::string("v2"));
        check_spec(spec);
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void write_ground_truth_json(const GroundTruth& truth, const std::string& path) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& it : truth.items) {
        items.push_back({{"item_id", it.item_id},
                         {"q_v1", it.q_v1},
                         {"q_v2", it.q_v2},
                         {"true_delta", it.true_delta},
                         {"true_floor_ceiling", it.true_floor_ceiling}});
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write ground truth: " + path);
    out << nlohmann::json{{"items", items}}.dump(2) << '\n';
}

}  // namespace rcb
