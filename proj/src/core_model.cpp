#include "rcb/core_model.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "rcb/errors.hpp"

namespace rcb {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line) {
    // Plain comma split with double-quote support.
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    out.push_back(std::move(field));
    return out;
}

bool parse_bool(const std::string& s, std::size_t line_no) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ValidationError("line " + std::to_string(line_no) + ": invalid boolean '" + s + "'");
}

TrialRecord record_from_json(const json& j, std::size_t line_no) {
    TrialRecord r;
    try {
        r.item_id = j.at("item_id").get<std::string>();
        r.model_id = j.at("model_id").get<std::string>();
        r.sample_index = j.at("sample_index").get<int>();
        r.correct = j.at("correct").get<bool>();
        r.valid = j.value("valid", true);
        if (j.contains("seed") && !j["seed"].is_null()) r.seed = j["seed"].get<long long>();
        r.domain = j.value("domain", std::string{});
        r.response_raw = j.value("response_raw", std::string{});
    } catch (const json::exception& e) {
        throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    return r;
}

std::vector<TrialRecord> read_records(std::istream& in, TrialFormat format) {
    std::vector<TrialRecord> records;
    std::string line;
    std::size_t line_no = 0;

    if (format == TrialFormat::jsonl) {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded()) {
                throw ValidationError("line " + std::to_string(line_no) + ": malformed JSON");
            }
            records.push_back(record_from_json(j, line_no));
        }
        return records;
    }

    // CSV: header row names the columns; booleans as true/false.
    if (!std::getline(in, line)) return records;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* required : {"item_id", "model_id", "sample_index", "correct"}) {
        if (!col.count(required)) {
            throw ValidationError(std::string("csv header missing column '") + required + "'");
        }
    }
    auto get = [&](const std::vector<std::string>& row, const char* name) -> std::optional<std::string> {
        auto it = col.find(name);
        if (it == col.end() || it->second >= row.size()) return std::nullopt;
        return row[it->second];
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto row = split_csv_line(line);
        TrialRecord r;
        try {
            r.item_id = get(row, "item_id").value();
            r.model_id = get(row, "model_id").value();
            r.sample_index = std::stoi(get(row, "sample_index").value());
        } catch (const std::exception&) {
            throw ValidationError("line " + std::to_string(line_no) + ": malformed row");
        }
        r.correct = parse_bool(get(row, "correct").value(), line_no);
        if (auto v = get(row, "valid"); v && !v->empty()) r.valid = parse_bool(*v, line_no);
        if (auto v = get(row, "seed"); v && !v->empty()) r.seed = std::stoll(*v);
        if (auto v = get(row, "domain")) r.domain = *v;
        if (auto v = get(row, "response_raw")) r.response_raw = *v;
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace

TrialSet parse_trials(std::istream& in, TrialFormat format, int declared_k) {
    if (declared_k < 2) throw ValidationError("declared K must be >= 2");
    const auto records = read_records(in, format);

    TrialSet set;
    set.k = declared_k;

    // Keyed map, then canonical ordering; input order cannot matter.
    std::map<std::string, ItemTrials> items;
    std::map<std::pair<std::string, int>, bool> seen;
    for (const auto& r : records) {
        if (set.model_id.empty()) {
            set.model_id = r.model_id;
        } else if (set.model_id != r.model_id) {
            throw ValidationError("mixed model_id in one trial stream: '" + set.model_id +
                                  "' vs '" + r.model_id + "'");
        }
        if (r.sample_index < 0 || r.sample_index >= declared_k) {
            throw ValidationError("item '" + r.item_id + "': sample_index " +
                                  std::to_string(r.sample_index) + " outside declared K = " +
                                  std::to_string(declared_k));
        }
        const auto key = std::make_pair(r.item_id, r.sample_index);
        if (seen.count(key)) {
            throw ValidationError("duplicate trial key (" + r.item_id + ", " + r.model_id +
                                  ", " + std::to_string(r.sample_index) + ")");
        }
        seen[key] = true;
        auto& item = items[r.item_id];
        if (item.slots.empty()) {
            item.item_id = r.item_id;
            item.slots.resize(static_cast<std::size_t>(declared_k));
        }
        if (!r.domain.empty()) item.domain = r.domain;
        auto& slot = item.slots[static_cast<std::size_t>(r.sample_index)];
        slot.correct = r.correct;
        slot.valid = r.valid;
    }

    set.items.reserve(items.size());
    for (auto& [id, item] : items) set.items.push_back(std::move(item));
    return set;
}

TrialSet parse_trials_file(const std::string& path, int declared_k) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trial file: " + path);
    const TrialFormat fmt =
        path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0 ? TrialFormat::csv
                                                                          : TrialFormat::jsonl;
    return parse_trials(in, fmt, declared_k);
}

void write_trials_jsonl(const TrialSet& trials, std::ostream& out) {
    using nlohmann::json;
    for (const auto& item : trials.items) {
        for (std::size_t s = 0; s < item.slots.size(); ++s) {
            json j;
            j["item_id"] = item.item_id;
            j["model_id"] = trials.model_id;
            j["sample_index"] = static_cast<int>(s);
            j["correct"] = item.slots[s].correct;
            j["valid"] = item.slots[s].valid;
            if (!item.domain.empty()) j["domain"] = item.domain;
            out << j.dump() << '\n';
        }
    }
}

AccuracyTable compute_item_accuracy(const TrialSet& trials) {
    AccuracyTable acc;
    acc.model_id = trials.model_id;
    acc.rows.reserve(trials.items.size());
    for (const auto& item : trials.items) {
        AccuracyRow row;
        row.item_id = item.item_id;
        row.domain = item.domain;
        row.k_valid = item.valid_count();
        row.n_correct = item.correct_count();
        acc.rows.push_back(std::move(row));
    }
    return acc;
}

double aggregate_accuracy(const AccuracyTable& acc) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : acc.rows) {
        if (!row.defined()) continue;
        sum += row.p();
        ++n;
    }
    if (n == 0) throw AnalysisError("aggregate_accuracy: no items with defined accuracy");
    return sum / static_cast<double>(n);
}

ValidationReport validate_trials(const TrialSet& trials, int min_valid) {
    ValidationReport rep;
    rep.n_items = trials.items.size();
    for (const auto& item : trials.items) {
        for (const auto& slot : item.slots) {
            if (slot.valid) {
                ++rep.n_trials;
            } else {
                ++rep.n_missing_slots;
                ++rep.n_invalid;
            }
        }
        if (item.valid_count() < min_valid) rep.items_below_min_valid.push_back(item.item_id);
    }
    rep.n_trials += rep.n_invalid;
    return rep;
}

namespace {

template <typename Rows>
void check_matched(const Rows& a, const Rows& b, const std::string& ida, const std::string& idb) {
    std::vector<std::string> only_a, only_b;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (i < a.size() && j < b.size() && a[i].item_id == b[j].item_id) {
            ++i;
            ++j;
        } else if (j >= b.size() || (i < a.size() && a[i].item_id < b[j].item_id)) {
            only_a.push_back(a[i].item_id);
            ++i;
        } else {
            only_b.push_back(b[j].item_id);
            ++j;
        }
    }
    if (only_a.empty() && only_b.empty()) return;
    std::ostringstream msg;
    msg << "item sets differ between '" << ida << "' and '" << idb << "':";
    auto list = [&msg](const char* tag, const std::vector<std::string>& ids) {
        if (ids.empty()) return;
        msg << ' ' << tag;
        for (std::size_t k = 0; k < ids.size() && k < 10; ++k) msg << ' ' << ids[k];
        if (ids.size() > 10) msg << " (+" << ids.size() - 10 << " more)";
    };
    list("only-first:", only_a);
    list("only-second:", only_b);
    throw ValidationError(msg.str());
}

}  // namespace

void require_matched_items(const AccuracyTable& a, const AccuracyTable& b) {
    check_matched(a.rows, b.rows, a.model_id, b.model_id);
}

void require_matched_items(const TrialSet& a, const TrialSet& b) {
    check_matched(a.items, b.items, a.model_id, b.model_id);
}

}  // namespace rcb
