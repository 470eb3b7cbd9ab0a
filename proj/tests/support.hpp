#pragma once

#include "bannerscope/dom.hpp"
#include "bannerscope/labels.hpp"
#include "bannerscope/random.hpp"

#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <unistd.h>

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path fixture_dir() { return fs::path(BANNERSCOPE_FIXTURE_DIR); }
inline fs::path corpus_dir() { return fixture_dir() / "corpus"; }

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("bannerscope-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

/// First element whose id attribute equals `id`.
inline bannerscope::dom::NodeId by_id(const bannerscope::dom::DomTree& t, std::string_view id) {
    for (std::uint32_t i = 0; i < t.size(); ++i) {
        const auto* v = t[bannerscope::dom::NodeId{i}].attribute("id");
        if (v && *v == id) return bannerscope::dom::NodeId{i};
    }
    throw std::runtime_error("no element with id " + std::string(id));
}

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const fs::path& p, const std::string& content) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline nlohmann::json truth() { return nlohmann::json::parse(slurp(fixture_dir() / "truth.json")); }

/// Reads a JSONL label file without going through LabelStore.
inline std::vector<bannerscope::ml::LabelRecord> read_labels(const fs::path& p) {
    std::vector<bannerscope::ml::LabelRecord> out;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        out.push_back({j.at("text").get<std::string>(),
                       *bannerscope::ml::parse_button_class(j.at("label").get<std::string>()),
                       bannerscope::ml::LabelSource::Manual});
    }
    return out;
}

/// Random tree whose shape covers deep chains and wide fans.
inline bannerscope::dom::DomTree random_tree(bannerscope::SeededRng& rng, std::size_t nodes) {
    using namespace bannerscope::dom;
    DomTree::Builder b;
    std::vector<NodeId> open{NodeId{0}};
    for (std::size_t i = 0; i < nodes; ++i) {
        const std::size_t keep = 1 + rng.below(open.size());
        open.resize(keep);
        const NodeId parent = open.back();
        if (rng.below(5) == 0) {
            b.add_comment(parent, "c");
        } else {
            open.push_back(b.add_element(parent, "div"));
        }
    }
    return std::move(b).finish();
}

} // namespace testsupport
