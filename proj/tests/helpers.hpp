#pragma once

#include <string>
#include <vector>

#include "rcb/core_model.hpp"

namespace rcb::test {

// Slot spec: 1 correct, 0 wrong, -1 invalid.
inline TrialSet make_trials(const std::string& model_id,
                            const std::vector<std::vector<int>>& items,
                            const std::vector<std::string>& domains = {}) {
    TrialSet set;
    set.model_id = model_id;
    set.k = items.empty() ? 2 : static_cast<int>(items.front().size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        ItemTrials item;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "item_%03zu", i);
        item.item_id = buf;
        if (!domains.empty()) item.domain = domains[i % domains.size()];
        for (int v : items[i]) {
            TrialSlot slot;
            slot.valid = v >= 0;
            slot.correct = v == 1;
            item.slots.push_back(slot);
        }
        set.items.push_back(std::move(item));
    }
    return set;
}

// n_correct out of K valid samples per item.
inline TrialSet make_trials_counts(const std::string& model_id, int k,
                                   const std::vector<int>& correct_counts,
                                   const std::vector<std::string>& domains = {}) {
    std::vector<std::vector<int>> items;
    for (int c : correct_counts) {
        std::vector<int> slots(static_cast<std::size_t>(k), 0);
        for (int j = 0; j < c; ++j) slots[static_cast<std::size_t>(j)] = 1;
        items.push_back(std::move(slots));
    }
    return make_trials(model_id, items, domains);
}

inline AccuracyTable make_accuracy(const std::string& model_id, int k,
                                   const std::vector<int>& correct_counts,
                                   const std::vector<std::string>& domains = {}) {
    return compute_item_accuracy(make_trials_counts(model_id, k, correct_counts, domains));
}

}  // namespace rcb::test
