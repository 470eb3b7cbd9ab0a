#include "bannerscope/pipeline.hpp"

#include "bannerscope/css.hpp"
#include "bannerscope/error.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <thread>

namespace bannerscope::pipeline {

namespace {

void remember(ScanResult& r, const dom::DomTree& tree, dom::NodeId node) {
    if (!r.paths.contains(node)) r.paths.emplace(node, dom::node_path(tree, node));
}

} // namespace

std::string_view to_string(ScanStatus s) {
    switch (s) {
    case ScanStatus::Ok: return "ok";
    case ScanStatus::Skipped: return "skipped";
    case ScanStatus::Failed: return "failed";
    }
    return "ok";
}

ScanResult scan_document(std::string_view html, const std::vector<std::optional<std::string>>& stylesheets,
                         const ScanOptions& options) {
    const auto& lexicon = options.lexicon ? *options.lexicon : banner::default_lexicon();
    const auto tree = dom::parse_html(html);
    const auto rules = css::collect_document_rules(tree, stylesheets);
    const css::StyleMap styles(tree, rules);

    ScanResult r;
    const auto hits = banner::find_keyword_hits(tree, lexicon);
    const auto candidates = banner::generate_candidates(tree, hits, styles, lexicon, options.candidates);
    r.banner = banner::select_banner(candidates);
    if (!r.banner) return r;
    remember(r, tree, r.banner->root);

    const auto found = clickables::extract_clickables(tree, r.banner->root, styles);
    std::vector<ml::Prediction> predictions;
    for (const auto& c : found) {
        ClickableResult cr{c, std::nullopt};
        if (options.model) {
            cr.prediction = ml::predict(*options.model, c.label);
            predictions.push_back(*cr.prediction);
        }
        remember(r, tree, c.node);
        r.clickables.push_back(std::move(cr));
    }
    if (!options.model) return r;

    if (const auto a = dark::best_of_class(predictions, ml::ButtonClass::Accept)) r.accept_node = found[*a].node;
    if (const auto j = dark::best_of_class(predictions, ml::ButtonClass::Reject)) r.reject_node = found[*j].node;
    r.findings = dark::detect_findings(tree, r.banner->root, found, predictions, styles, options.threshold,
                                       options.weights);
    for (const auto& f : r.findings) {
        remember(r, tree, f.accept_node);
        if (f.reject_node) remember(r, tree, *f.reject_node);
        if (f.lca) remember(r, tree, *f.lca);
    }
    if (r.accept_node && r.reject_node) {
        remember(r, tree, dom::lowest_common_ancestor(tree, *r.accept_node, *r.reject_node));
    }
    return r;
}

ScanResult scan_entry(const std::filesystem::path& corpus_dir, const corpus::CorpusEntry& entry,
                      const ScanOptions& options) {
    ScanResult r;
    if (entry.html_path.empty() || entry.http_status != 200) {
        r.status = ScanStatus::Skipped;
        r.note = entry.error.empty() ? "http status " + std::to_string(entry.http_status) : entry.error;
    } else if (entry.excluded) {
        r.status = ScanStatus::Skipped;
        r.note = "language " + std::string(corpus::to_string(entry.language)) + " excluded by the crawl filter";
    } else {
        try {
            const auto doc = corpus::read_entry(corpus_dir, entry);
            r = scan_document(doc.html, doc.stylesheets, options);
        } catch (const IoError& e) {
            r = {};
            r.status = ScanStatus::Failed;
            r.note = e.what();
        }
    }
    r.entry_id = entry.id;
    r.url = entry.url;
    return r;
}

std::vector<ScanResult> scan_corpus(const std::filesystem::path& corpus_dir, const corpus::CorpusManifest& manifest,
                                    const ScanOptions& options) {
    const auto& entries = manifest.entries;
    std::vector<ScanResult> results(entries.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    const auto worker = [&] {
        for (std::size_t i = next++; i < entries.size(); i = next++) {
            try {
                results[i] = scan_entry(corpus_dir, entries[i], options);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(entries.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    std::sort(results.begin(), results.end(),
              [](const ScanResult& a, const ScanResult& b) { return a.entry_id < b.entry_id; });
    return results;
}

std::vector<Outline> plan_annotation(const dom::DomTree& tree, const ScanResult& scan) {
    if (!scan.banner) throw MissingBanner("no banner was detected on " + (scan.url.empty() ? "the page" : scan.url));
    if (!scan.accept_node) throw MissingBanner("the banner has no detected accept button");
    std::vector<Outline> plan{{*scan.accept_node, std::string(kAcceptOutline)}};
    if (scan.reject_node) {
        plan.push_back({*scan.reject_node, std::string(kRejectOutline)});
        const auto lca = dom::lowest_common_ancestor(tree, *scan.accept_node, *scan.reject_node);
        if (lca != *scan.accept_node && lca != *scan.reject_node) plan.push_back({lca, std::string(kLcaOutline)});
    }
    for (const auto& o : plan) {
        if (!tree.contains(o.target) || !tree[o.target].is_element()) {
            throw PreconditionError("annotation target " + std::to_string(o.target.value) + " is not an element");
        }
    }
    return plan;
}

std::string annotate_document(std::string_view html, const ScanResult& scan) {
    const auto tree = dom::parse_html(html);
    dom::AttributeOverrides overrides;
    for (const auto& o : plan_annotation(tree, scan)) overrides[o.target].push_back({"style", o.style});
    return dom::serialize(tree, overrides);
}

std::vector<std::string> label_pool(const std::vector<ScanResult>& results) {
    std::set<std::string> labels;
    for (const auto& r : results) {
        for (const auto& c : r.clickables) labels.insert(c.element.label);
    }
    return {labels.begin(), labels.end()};
}

std::vector<ml::LabelRecord> training_records(const std::vector<ml::LabelRecord>& records) {
    auto all = ml::seed_records();
    all.insert(all.end(), records.begin(), records.end());
    return ml::merge_training_records(all);
}

} // namespace bannerscope::pipeline
