#include "bannerscope/tfidf.hpp"

#include "bannerscope/error.hpp"
#include "bannerscope/text_util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace bannerscope::ml {

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char32_t cp : text::decode_utf8(text)) {
        if (text::is_word_char(cp)) {
            text::append_utf8(current, text::to_lower(cp));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> document_frequency,
                       std::size_t document_count)
    : terms_(std::move(terms)), df_(std::move(document_frequency)), document_count_(document_count) {
    if (terms_.size() != df_.size()) throw PreconditionError("vocabulary: terms and frequencies differ in length");
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (!index_.emplace(terms_[i], i).second) throw PreconditionError("vocabulary: duplicate term " + terms_[i]);
    }
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view term) const {
    const auto it = index_.find(std::string(term));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double Vocabulary::idf(std::size_t index) const {
    return std::log((1.0 + static_cast<double>(document_count_)) / (1.0 + static_cast<double>(df_.at(index)))) + 1.0;
}

Vocabulary build_vocabulary(std::span<const std::string> texts, std::size_t min_df) {
    std::vector<std::string> order;
    std::map<std::string, std::size_t> df;
    for (const auto& t : texts) {
        std::set<std::string> seen;
        for (auto& tok : tokenize(t)) {
            if (!seen.insert(tok).second) continue;
            if (df[tok]++ == 0) order.push_back(tok);
        }
    }
    std::vector<std::string> terms;
    std::vector<std::size_t> freqs;
    for (auto& term : order) {
        const std::size_t f = df[term];
        if (f < std::max<std::size_t>(min_df, 1)) continue;
        freqs.push_back(f);
        terms.push_back(std::move(term));
    }
    return Vocabulary(std::move(terms), std::move(freqs), texts.size());
}

double TfIdfVector::norm() const {
    double s = 0;
    for (const auto& [i, w] : entries) s += w * w;
    return std::sqrt(s);
}

double TfIdfVector::dot(std::span<const double> dense) const {
    double s = 0;
    for (const auto& [i, w] : entries) s += w * dense[i];
    return s;
}

std::vector<double> TfIdfVector::to_dense(std::size_t dimension) const {
    std::vector<double> out(dimension, 0.0);
    for (const auto& [i, w] : entries) out.at(i) = w;
    return out;
}

TfIdfVector vectorize(std::string_view text, const Vocabulary& vocab) {
    std::map<std::uint32_t, double> counts;
    for (const auto& tok : tokenize(text)) {
        if (auto idx = vocab.index_of(tok)) counts[static_cast<std::uint32_t>(*idx)] += 1.0;
    }
    TfIdfVector v;
    double sum_sq = 0;
    for (const auto& [idx, tf] : counts) {
        const double w = tf * vocab.idf(idx);
        v.entries.emplace_back(idx, w);
        sum_sq += w * w;
    }
    if (sum_sq > 0) {
        const double n = std::sqrt(sum_sq);
        for (auto& [idx, w] : v.entries) w /= n;
    }
    return v;
}

} // namespace bannerscope::ml
