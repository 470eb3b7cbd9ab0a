#include "bannerscope/report.hpp"

#include <json.hpp>

namespace bannerscope::pipeline {

namespace {

using Json = nlohmann::ordered_json;

Json node_json(const ScanResult& r, dom::NodeId node) {
    Json j;
    j["node"] = node.value;
    const auto it = r.paths.find(node);
    j["path"] = it == r.paths.end() ? Json::array() : Json(it->second);
    return j;
}

Json score_json(const dark::DissimilarityScore& s) {
    return Json{{"bg_delta_e", s.bg_delta_e},
                {"text_delta_e", s.text_delta_e},
                {"prominence_gap", s.prominence_gap},
                {"size_component", s.size_component},
                {"total", s.total}};
}

Json entry_json(const ScanResult& r) {
    Json j;
    j["entry_id"] = r.entry_id;
    j["url"] = r.url;
    j["status"] = to_string(r.status);
    if (!r.note.empty()) j["note"] = r.note;
    if (r.banner) {
        const auto& b = *r.banner;
        Json bj = node_json(r, b.root);
        bj["score"] = b.score;
        bj["breakdown"] = Json{{"distinct_keywords", b.distinct_keywords},
                               {"clickable_count", b.clickable_count},
                               {"positioning_bonus", b.positioning_bonus},
                               {"attribute_bonus", b.attribute_bonus},
                               {"size_penalty", b.size_penalty},
                               {"text_length", b.text_length}};
        j["banner"] = std::move(bj);
    } else {
        j["banner"] = nullptr;
    }
    auto clickables = Json::array();
    for (const auto& c : r.clickables) {
        Json cj = node_json(r, c.element.node);
        cj["tag"] = c.element.tag;
        cj["label"] = c.element.label;
        cj["detection_source"] = clickables::to_string(c.element.detection_source);
        if (c.prediction) {
            cj["predicted"] = ml::to_string(c.prediction->label);
            cj["margin"] = c.prediction->margin;
        } else {
            cj["predicted"] = nullptr;
            cj["margin"] = nullptr;
        }
        clickables.push_back(std::move(cj));
    }
    j["clickables"] = std::move(clickables);
    auto findings = Json::array();
    for (const auto& f : r.findings) {
        Json fj;
        fj["kind"] = dark::to_string(f.kind);
        fj["severity"] = dark::to_string(f.severity);
        fj["accept"] = node_json(r, f.accept_node);
        fj["reject"] = f.reject_node ? node_json(r, *f.reject_node) : Json(nullptr);
        fj["lca"] = f.lca ? node_json(r, *f.lca) : Json(nullptr);
        fj["score"] = f.score ? score_json(*f.score) : Json(nullptr);
        fj["explanation"] = f.explanation;
        findings.push_back(std::move(fj));
    }
    j["findings"] = std::move(findings);
    return j;
}

} // namespace

std::string report_to_json(const std::vector<ScanResult>& results, const ReportInfo& info) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["mode"] = info.mode;
    j["threshold"] = info.threshold ? Json(*info.threshold) : Json(nullptr);
    j["model_fingerprint"] = info.model_fingerprint ? Json(*info.model_fingerprint) : Json(nullptr);
    auto entries = Json::array();
    for (const auto& r : results) entries.push_back(entry_json(r));
    j["entries"] = std::move(entries);
    return j.dump(2) + "\n";
}

std::string findings_to_json(const std::vector<ScanResult>& results) {
    Json j;
    auto entries = Json::array();
    for (const auto& r : results) {
        if (!r.findings.empty()) entries.push_back(entry_json(r));
    }
    j["entries"] = std::move(entries);
    return j.dump();
}

} // namespace bannerscope::pipeline
