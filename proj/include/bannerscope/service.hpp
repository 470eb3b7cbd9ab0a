#pragma once

// HTTP API for the review UI:
//   GET  /api/queue?limit=N
//   POST /api/labels            {"text": ..., "label": "accept|reject|settings|other"}
//   POST /api/retrain
//   GET  /api/findings
//   GET  /api/pages/{id}/annotated

#include "bannerscope/active.hpp"
#include "bannerscope/labels.hpp"
#include "bannerscope/pipeline.hpp"
#include "bannerscope/svm.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace bannerscope::service {

struct ServiceConfig {
    std::filesystem::path corpus_dir;
    std::filesystem::path model_path;  // loaded at startup, rewritten by every retrain
    std::filesystem::path labels_path; // append-only label store
    double threshold = dark::kDefaultThreshold;
    ml::SvmParams params;
    std::size_t default_queue_limit = 10;
    std::size_t max_queue_limit = 1000;
};

class Service {
public:
    /// Loads the manifest, model and label store and scans the corpus.
    /// Throws IoError or FormatError.
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds and serves on a background thread; port 0 picks a free port.
    /// Returns the bound port. Throws Error if the address is unavailable.
    int start(const std::string& host, int port);
    /// Blocks until stop() is called.
    void wait();
    void stop();

    // The operations behind the endpoints, for in-process callers.
    std::vector<ml::ActiveQuery> queue(std::size_t limit) const;
    ml::LabelRecord add_label(const std::string& text, ml::ButtonClass label,
                              ml::LabelSource source = ml::LabelSource::Active);
    /// Re-fits from the seeds plus every stored record, saves the model and
    /// rescans the corpus. Returns the new fingerprint.
    std::string retrain();
    std::string model_fingerprint() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace bannerscope::service
