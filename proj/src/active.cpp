#include "bannerscope/active.hpp"

#include "bannerscope/clickables.hpp"
#include "bannerscope/error.hpp"

#include <algorithm>

namespace bannerscope::ml {

std::vector<ActiveQuery> select_queries(const LinearModel& model, const std::vector<std::string>& pool,
                                        std::size_t batch) {
    if (batch == 0) throw PreconditionError("batch must be at least 1");
    std::set<std::string> seen;
    std::vector<ActiveQuery> all;
    for (const auto& raw : pool) {
        std::string text = clickables::normalize_label(raw);
        if (text.empty() || !seen.insert(text).second) continue;
        const Prediction p = predict(model, text);
        all.push_back({std::move(text), p.label, p.margin});
    }
    const auto less = [](const ActiveQuery& a, const ActiveQuery& b) {
        if (a.margin != b.margin) return a.margin < b.margin;
        return a.text < b.text;
    };
    const std::size_t n = std::min(batch, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(), less);
    all.resize(n);
    return all;
}

std::vector<std::string> unlabeled_pool(const std::vector<std::string>& pool, const std::set<std::string>& labeled) {
    std::vector<std::string> out;
    for (const auto& raw : pool) {
        std::string text = clickables::normalize_label(raw);
        if (!text.empty() && !labeled.contains(text)) out.push_back(std::move(text));
    }
    return out;
}

} // namespace bannerscope::ml
