#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rcb {

// One generation attempt as recorded in a trial file.
struct TrialRecord {
    std::string item_id;
    std::string model_id;
    int sample_index = 0;
    std::optional<long long> seed;  // provenance only
    bool correct = false;
    bool valid = true;
    std::string domain;
    std::string response_raw;  // never used by statistics
};

struct TrialSlot {
    bool correct = false;
    bool valid = false;
};

struct ItemTrials {
    std::string item_id;
    std::string domain;
    std::vector<TrialSlot> slots;  // always exactly K entries

    int valid_count() const {
        int n = 0;
        for (const auto& s : slots)
            if (s.valid) ++n;
        return n;
    }
    int correct_count() const {
        int n = 0;
        for (const auto& s : slots)
            if (s.valid && s.correct) ++n;
        return n;
    }
};

// One model's item x sample matrix. Items are kept in canonical order
// (item_id lexicographic); slots missing from the input are materialised
// with valid = false.
struct TrialSet {
    std::string model_id;
    int k = 0;
    std::vector<ItemTrials> items;
};

struct AccuracyRow {
    std::string item_id;
    std::string domain;
    int k_valid = 0;
    int n_correct = 0;

    bool defined() const { return k_valid > 0; }
    // Exact proportion of small integer counts; derived on demand so no
    // floating accumulation happens at this stage.
    double p() const { return static_cast<double>(n_correct) / static_cast<double>(k_valid); }
};

struct AccuracyTable {
    std::string model_id;
    std::vector<AccuracyRow> rows;
};

struct ValidationReport {
    std::size_t n_items = 0;
    std::size_t n_trials = 0;
    std::size_t n_invalid = 0;
    std::size_t n_missing_slots = 0;
    std::vector<std::string> duplicate_keys;
    std::vector<std::string> items_below_min_valid;
};

enum class TrialFormat { jsonl, csv };

// Parses a trial stream for a single model. Duplicate (item, model, sample)
// keys and sample_index >= declared_k are hard errors; the row order of the
// input never affects the result.
TrialSet parse_trials(std::istream& in, TrialFormat format, int declared_k);

TrialSet parse_trials_file(const std::string& path, int declared_k);

// JSON Lines serialisation in canonical key order (item_id lexicographic,
// sample_index ascending).
void write_trials_jsonl(const TrialSet& trials, std::ostream& out);

AccuracyTable compute_item_accuracy(const TrialSet& trials);

// Mean of p over items with defined p. Errors when no item has a defined p.
double aggregate_accuracy(const AccuracyTable& acc);

ValidationReport validate_trials(const TrialSet& trials, int min_valid);

// Hard error when the two tables do not cover the identical item set.
void require_matched_items(const AccuracyTable& a, const AccuracyTable& b);
void require_matched_items(const TrialSet& a, const TrialSet& b);

}  // namespace rcb
