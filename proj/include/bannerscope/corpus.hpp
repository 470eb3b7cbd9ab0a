#pragma once

// HTTP fetching, the on-disk corpus layout and its JSON manifest.
//
//   <dir>/manifest.json
//   <dir>/<id>/page.html
//   <dir>/<id>/css/<n>.css     n = index of the stylesheet link in document order

#include "bannerscope/language.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bannerscope::corpus {

inline constexpr std::string_view kToolVersion = "bannerscope 0.1.0";
inline constexpr std::string_view kUserAgent = "bannerscope/0.1 (consent banner research crawler)";

struct Url {
    std::string scheme; // "http" or "https"
    std::string host;
    int port = 0;
    std::string target = "/"; // path plus query, never empty

    bool default_port() const noexcept { return port == (scheme == "https" ? 443 : 80); }
    /// scheme://host[:port]
    std::string origin() const;
    std::string str() const { return origin() + target; }
};

/// Absolute http(s) URLs only; the fragment is dropped.
std::optional<Url> parse_url(std::string_view text);
/// Resolves a reference (absolute, scheme-relative, absolute-path or
/// relative) against `base`; dot segments are removed.
std::optional<std::string> resolve_url(const Url& base, std::string_view reference);

struct FetchOptions {
    double timeout_s = 10.0;
    int max_redirects = 5;
    std::string user_agent{kUserAgent};
};

struct FetchedStylesheet {
    std::string url;
    std::optional<std::string> content; // empty when the fetch failed
};

struct FetchResult {
    int status = 0;
    std::string final_url;
    std::string body;
    /// One slot per `link rel=stylesheet`, in document order; only fetched for status 200.
    std::vector<FetchedStylesheet> stylesheets;
};

/// Plain GET following up to max_redirects redirects. Throws Timeout,
/// DnsFailure, TooManyRedirects or FetchError.
std::string fetch_body(const std::string& url, const FetchOptions& options, int& status, std::string& final_url);

/// Page plus its linked stylesheets (best effort). Throws like fetch_body.
FetchResult fetch_page(const std::string& url, const FetchOptions& options = {});

struct CorpusEntry {
    std::string id;
    std::string url;
    std::string fetched_at; // ISO 8601, UTC
    int http_status = 0;    // 0 when no response was received
    PageLanguage language = PageLanguage::Unknown;
    std::string html_path;                     // relative to the corpus dir; empty without a page
    std::vector<std::string> stylesheet_paths; // positional: css/<n>.css for link n
    std::vector<std::string> missing_stylesheets;
    std::string error;     // "", "timeout", "dns_failure", "too_many_redirects", ...
    bool excluded = false; // failed the crawl's language filter

    friend bool operator==(const CorpusEntry&, const CorpusEntry&) = default;
};

struct CorpusManifest {
    std::string created_with{kToolVersion};
    std::optional<PageLanguage> language_filter;
    std::vector<CorpusEntry> entries;

    const CorpusEntry* find(std::string_view id) const;
    friend bool operator==(const CorpusManifest&, const CorpusManifest&) = default;
};

/// Stable 16-hex-digit id of a URL.
std::string entry_id(std::string_view url);

std::string manifest_to_json(const CorpusManifest& manifest);
/// Throws FormatError.
CorpusManifest manifest_from_json(std::string_view json);
/// Atomic write of <dir>/manifest.json. Throws IoError.
void write_manifest(const std::filesystem::path& dir, const CorpusManifest& manifest);
/// Throws IoError or FormatError.
CorpusManifest load_manifest(const std::filesystem::path& dir);

/// One URL per line; blank lines and '#' comments skipped. Throws IoError.
std::vector<std::string> read_url_list(const std::filesystem::path& path);

/// Writes the page and its stylesheets under <dir>/<id>/ and returns the
/// entry. Stylesheet slots without content are recorded as missing.
CorpusEntry store_entry(const std::filesystem::path& dir, const std::string& url, int status, std::string_view html,
                        const std::vector<std::optional<std::string>>& stylesheets, std::string fetched_at);

struct EntryDocument {
    std::string html;
    std::vector<std::optional<std::string>> stylesheets; // positional, like stylesheet_paths
};

/// Throws IoError if the page is unreadable; unreadable sheets become empty slots.
EntryDocument read_entry(const std::filesystem::path& dir, const CorpusEntry& entry);

struct CrawlOptions {
    FetchOptions fetch;
    std::optional<PageLanguage> language_filter;
    std::size_t max_in_flight = 8;
};

/// Fetches every URL (duplicates once) with bounded parallelism and one
/// request at a time per host, stores the results under `out_dir` and
/// writes the manifest last. Fetch failures are recorded, never thrown.
/// Throws IoError when the output cannot be written.
CorpusManifest crawl(const std::vector<std::string>& urls, const std::filesystem::path& out_dir,
                     const CrawlOptions& options = {});

std::string utc_timestamp_now();

} // namespace bannerscope::corpus
