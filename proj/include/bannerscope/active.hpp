#pragma once

#include "bannerscope/svm.hpp"

#include <set>
#include <string>
#include <vector>

namespace bannerscope::ml {

struct ActiveQuery {
    std::string text;
    ButtonClass predicted = ButtonClass::Other;
    double margin = 0.0;

    friend bool operator==(const ActiveQuery&, const ActiveQuery&) = default;
};

/// The `batch` pool texts with the smallest margins, ascending, ties by text.
/// Pool texts are normalized and deduplicated first; excluding labeled texts
/// is the caller's job. Throws PreconditionError if batch is 0.
std::vector<ActiveQuery> select_queries(const LinearModel& model, const std::vector<std::string>& pool,
                                        std::size_t batch);

/// Pool minus every text in `labeled` (compared after normalization).
std::vector<std::string> unlabeled_pool(const std::vector<std::string>& pool, const std::set<std::string>& labeled);

} // namespace bannerscope::ml
