#pragma once

// End-to-end analysis of one document or a whole corpus, and the outline
// annotation of detected buttons.

#include "bannerscope/banner.hpp"
#include "bannerscope/clickables.hpp"
#include "bannerscope/corpus.hpp"
#include "bannerscope/dark_pattern.hpp"
#include "bannerscope/svm.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bannerscope::pipeline {

inline constexpr std::string_view kAcceptOutline = "outline:3px solid #ff8c00";
inline constexpr std::string_view kRejectOutline = "outline:3px solid #008000";
inline constexpr std::string_view kLcaOutline = "outline:3px dashed #1e64c8";

struct ScanOptions {
    const banner::KeywordLexicon* lexicon = nullptr; // null: the shipped lexicon
    const ml::LinearModel* model = nullptr;          // null: no predictions, no findings
    banner::CandidateOptions candidates;
    double threshold = dark::kDefaultThreshold;
    dark::DissimilarityWeights weights;
    std::size_t threads = 0; // corpus scans; 0 picks hardware concurrency
};

struct ClickableResult {
    clickables::ClickableElement element;
    std::optional<ml::Prediction> prediction;
};

enum class ScanStatus : std::uint8_t { Ok, Skipped, Failed };
std::string_view to_string(ScanStatus s);

struct ScanResult {
    std::string entry_id;
    std::string url;
    ScanStatus status = ScanStatus::Ok;
    std::string note; // why an entry was skipped or failed
    std::optional<banner::BannerCandidate> banner;
    std::vector<ClickableResult> clickables;
    std::optional<dom::NodeId> accept_node; // highest-margin Accept
    std::optional<dom::NodeId> reject_node; // highest-margin Reject
    std::vector<dark::Finding> findings;
    /// Root-to-node child-index path of every node the result mentions.
    std::map<dom::NodeId, std::vector<std::size_t>> paths;
};

/// parse -> styles -> banner -> clickables -> predictions -> findings.
ScanResult scan_document(std::string_view html, const std::vector<std::optional<std::string>>& stylesheets,
                         const ScanOptions& options);

/// Entries without a stored page or excluded by the crawl's language filter
/// are skipped; unreadable pages are reported as failed.
ScanResult scan_entry(const std::filesystem::path& corpus_dir, const corpus::CorpusEntry& entry,
                      const ScanOptions& options);

/// All entries, scanned in parallel, ordered by entry id.
std::vector<ScanResult> scan_corpus(const std::filesystem::path& corpus_dir, const corpus::CorpusManifest& manifest,
                                    const ScanOptions& options);

struct Outline {
    dom::NodeId target;
    std::string style;
};

/// Accept, then reject and their lowest common ancestor when present.
/// Throws MissingBanner without a banner or an accept button.
std::vector<Outline> plan_annotation(const dom::DomTree& tree, const ScanResult& scan);

/// The document serialized with the outline styles merged into the targets.
std::string annotate_document(std::string_view html, const ScanResult& scan);

/// Distinct clickable labels of all detected banners, sorted.
std::vector<std::string> label_pool(const std::vector<ScanResult>& results);

/// The shipped seed phrases merged with `records` (records win per text).
std::vector<ml::LabelRecord> training_records(const std::vector<ml::LabelRecord>& records);

} // namespace bannerscope::pipeline
