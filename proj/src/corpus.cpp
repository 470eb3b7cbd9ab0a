#include "bannerscope/corpus.hpp"

#include "bannerscope/css.hpp"
#include "bannerscope/dom.hpp"
#include "bannerscope/error.hpp"
#include "bannerscope/hash.hpp"
#include "bannerscope/io.hpp"
#include "bannerscope/text_util.hpp"

#include <httplib.h>
#include <json.hpp>
#include <netdb.h>
#include <sys/socket.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace bannerscope::corpus {

namespace {

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::string trim(std::string_view s) {
    const auto ws = " \t\r\n\f\v";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

/// RFC 3986 section 5.2.4.
std::string remove_dot_segments(std::string_view path) {
    std::vector<std::string> out;
    std::size_t i = 0;
    const bool absolute = !path.empty() && path.front() == '/';
    const bool trailing = path.ends_with("/") || path.ends_with("/.") || path.ends_with("/..");
    while (i <= path.size()) {
        const auto j = std::min(path.find('/', i), path.size());
        const auto seg = path.substr(i, j - i);
        if (seg == "..") {
            if (!out.empty()) out.pop_back();
        } else if (!seg.empty() && seg != ".") {
            out.emplace_back(seg);
        }
        i = j + 1;
    }
    std::string result = absolute ? "/" : "";
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (k) result += '/';
        result += out[k];
    }
    if (trailing && !out.empty()) result += '/';
    return result.empty() ? "/" : result;
}

void check_dns(const std::string& host) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const int rc = getaddrinfo(host.c_str(), nullptr, &hints, &res);
    if (res) freeaddrinfo(res);
    if (rc != 0) throw DnsFailure("cannot resolve host '" + host + "': " + gai_strerror(rc));
}

bool is_redirect(int status) {
    return status == 301 || status == 302 || status == 303 || status == 307 || status == 308;
}

std::string_view strip_fragment(std::string_view s) {
    const auto hash = s.find('#');
    return hash == std::string_view::npos ? s : s.substr(0, hash);
}

nlohmann::ordered_json entry_to_json(const CorpusEntry& e) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["url"] = e.url;
    j["fetched_at"] = e.fetched_at;
    j["http_status"] = e.http_status;
    j["language"] = to_string(e.language);
    j["html_path"] = e.html_path;
    j["stylesheet_paths"] = e.stylesheet_paths;
    j["missing_stylesheets"] = e.missing_stylesheets;
    j["error"] = e.error;
    j["excluded"] = e.excluded;
    return j;
}

CorpusEntry entry_from_json(const nlohmann::json& j) {
    CorpusEntry e;
    e.id = j.at("id").get<std::string>();
    e.url = j.at("url").get<std::string>();
    e.fetched_at = j.value("fetched_at", "");
    e.http_status = j.at("http_status").get<int>();
    const auto lang = parse_language(j.value("language", "unknown"));
    if (!lang) throw FormatError(0, "entry " + e.id + ": unknown language");
    e.language = *lang;
    e.html_path = j.value("html_path", "");
    e.stylesheet_paths = j.value("stylesheet_paths", std::vector<std::string>{});
    e.missing_stylesheets = j.value("missing_stylesheets", std::vector<std::string>{});
    e.error = j.value("error", "");
    e.excluded = j.value("excluded", false);
    return e;
}

/// Stays inside the corpus directory.
std::filesystem::path inside(const std::filesystem::path& dir, const std::string& rel) {
    const std::filesystem::path p(rel);
    if (p.is_absolute() || std::any_of(p.begin(), p.end(), [](const auto& part) { return part == ".."; })) {
        throw IoError("manifest path escapes the corpus directory: " + rel);
    }
    return dir / p;
}

} // namespace

std::string Url::origin() const {
    std::string out = scheme + "://" + host;
    if (!default_port()) out += ":" + std::to_string(port);
    return out;
}

std::optional<Url> parse_url(std::string_view text) {
    const std::string s = trim(strip_fragment(text));
    const auto sep = s.find("://");
    if (sep == std::string::npos) return std::nullopt;
    Url u;
    u.scheme = lower_ascii(s.substr(0, sep));
    if (u.scheme != "http" && u.scheme != "https") return std::nullopt;
    const auto rest = std::string_view(s).substr(sep + 3);
    const auto path_start = rest.find_first_of("/?");
    auto authority = rest.substr(0, path_start);
    if (const auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
    u.port = u.scheme == "https" ? 443 : 80;
    std::string_view host = authority;
    if (!authority.empty() && authority.front() == '[') {
        const auto close = authority.find(']');
        if (close == std::string_view::npos) return std::nullopt;
        host = authority.substr(0, close + 1);
        authority = authority.substr(close + 1);
        if (!authority.empty() && authority.front() != ':') return std::nullopt;
    } else if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
        host = authority.substr(0, colon);
        authority = authority.substr(colon);
    } else {
        authority = {};
    }
    if (!authority.empty()) {
        const auto digits = authority.substr(1);
        if (!digits.empty()) {
            if (digits.size() > 5 || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
                return std::nullopt;
            u.port = std::stoi(std::string(digits));
            if (u.port < 1 || u.port > 65535) return std::nullopt;
        }
    }
    if (host.empty()) return std::nullopt;
    u.host = lower_ascii(host);
    if (path_start != std::string_view::npos) {
        std::string target(rest.substr(path_start));
        if (target.front() == '?') target.insert(target.begin(), '/');
        u.target = std::move(target);
    }
    return u;
}

std::optional<std::string> resolve_url(const Url& base, std::string_view reference) {
    const std::string ref = trim(strip_fragment(reference));
    if (ref.find("://") != std::string::npos) {
        const auto u = parse_url(ref);
        return u ? std::optional<std::string>(u->str()) : std::nullopt;
    }
    if (ref.starts_with("//")) {
        const auto u = parse_url(base.scheme + ":" + ref);
        return u ? std::optional<std::string>(u->str()) : std::nullopt;
    }
    if (const auto colon = ref.find(':'); colon != std::string::npos && ref.find_first_of("/?") > colon) {
        return std::nullopt; // mailto:, data:, javascript: ...
    }
    const auto q = base.target.find('?');
    const std::string base_path = base.target.substr(0, q);
    std::string path;
    std::string query;
    if (ref.empty()) return base.str();
    if (ref.front() == '?') {
        path = base_path;
        query = ref;
    } else {
        const auto rq = ref.find('?');
        std::string ref_path = ref.substr(0, rq);
        if (rq != std::string::npos) query = ref.substr(rq);
        if (!ref_path.empty() && ref_path.front() == '/') {
            path = ref_path;
        } else {
            path = base_path.substr(0, base_path.rfind('/') + 1) + ref_path;
        }
    }
    return base.origin() + remove_dot_segments(path) + query;
}

std::string fetch_body(const std::string& url, const FetchOptions& options, int& status, std::string& final_url) {
    std::string current = url;
    for (int hop = 0;; ++hop) {
        const auto u = parse_url(current);
        if (!u) throw FetchError("invalid_url", "not an http(s) URL: " + current);
        const std::string host = u->host.front() == '[' ? u->host.substr(1, u->host.size() - 2) : u->host;
        check_dns(host);

        httplib::Client client(u->scheme + "://" + u->host + ":" + std::to_string(u->port));
        const auto sec = static_cast<time_t>(options.timeout_s);
        const auto usec = static_cast<time_t>((options.timeout_s - static_cast<double>(sec)) * 1e6);
        client.set_connection_timeout(sec, usec);
        client.set_read_timeout(sec, usec);
        client.set_write_timeout(sec, usec);
        client.set_follow_location(false);
        const httplib::Headers headers{{"User-Agent", options.user_agent}, {"Accept", "text/html,text/css,*/*"}};

        const auto started = std::chrono::steady_clock::now();
        auto res = client.Get(u->target, headers);
        if (!res) {
            const auto err = res.error();
            const double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            if (err == httplib::Error::ConnectionTimeout ||
                ((err == httplib::Error::Read || err == httplib::Error::Write) && elapsed >= 0.9 * options.timeout_s)) {
                throw Timeout("timed out fetching " + current);
            }
            throw FetchError("connection_error", "fetching " + current + ": " + httplib::to_string(err));
        }
        if (is_redirect(res->status) && res->has_header("Location")) {
            if (hop >= options.max_redirects) {
                throw TooManyRedirects("more than " + std::to_string(options.max_redirects) + " redirects from " + url);
            }
            const auto next = resolve_url(*u, res->get_header_value("Location"));
            if (!next) throw FetchError("invalid_url", "bad redirect target from " + current);
            current = *next;
            continue;
        }
        status = res->status;
        final_url = current;
        return std::move(res->body);
    }
}

FetchResult fetch_page(const std::string& url, const FetchOptions& options) {
    FetchResult r;
    r.body = fetch_body(url, options, r.status, r.final_url);
    if (r.status != 200) return r;
    const auto tree = dom::parse_html(r.body);
    const auto base = parse_url(r.final_url);
    for (const auto link : css::stylesheet_links(tree)) {
        FetchedStylesheet sheet;
        const auto href = tree[link].attribute("href");
        const auto resolved = href && base ? resolve_url(*base, *href) : std::nullopt;
        if (resolved) {
            sheet.url = *resolved;
            try {
                int st = 0;
                std::string fin;
                std::string body = fetch_body(*resolved, options, st, fin);
                if (st == 200) sheet.content = std::move(body);
            } catch (const FetchError&) {
                // best effort: recorded as missing
            }
        } else if (href) {
            sheet.url = *href;
        }
        r.stylesheets.push_back(std::move(sheet));
    }
    return r;
}

const CorpusEntry* CorpusManifest::find(std::string_view id) const {
    for (const auto& e : entries) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

std::string entry_id(std::string_view url) { return Fnv1a().update(url).hex(); }

std::string manifest_to_json(const CorpusManifest& manifest) {
    nlohmann::ordered_json j;
    j["created_with"] = manifest.created_with;
    j["language_filter"] = manifest.language_filter ? nlohmann::ordered_json(to_string(*manifest.language_filter))
                                                    : nlohmann::ordered_json(nullptr);
    auto entries = nlohmann::ordered_json::array();
    for (const auto& e : manifest.entries) entries.push_back(entry_to_json(e));
    j["entries"] = std::move(entries);
    return j.dump(2) + "\n";
}

CorpusManifest manifest_from_json(std::string_view json) {
    try {
        const auto j = nlohmann::json::parse(json);
        CorpusManifest m;
        m.created_with = j.value("created_with", "");
        if (j.contains("language_filter") && !j["language_filter"].is_null()) {
            m.language_filter = parse_language(j["language_filter"].get<std::string>());
            if (!m.language_filter) throw FormatError(0, "unknown language filter");
        }
        std::map<std::string, int> seen;
        for (const auto& ej : j.at("entries")) {
            auto e = entry_from_json(ej);
            if (seen[e.id]++) throw FormatError(0, "duplicate entry id " + e.id);
            m.entries.push_back(std::move(e));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(0, std::string("malformed manifest: ") + e.what());
    }
}

void write_manifest(const std::filesystem::path& dir, const CorpusManifest& manifest) {
    io::write_file_atomic(dir / "manifest.json", manifest_to_json(manifest));
}

CorpusManifest load_manifest(const std::filesystem::path& dir) {
    return manifest_from_json(io::read_file(dir / "manifest.json"));
}

std::vector<std::string> read_url_list(const std::filesystem::path& path) {
    std::istringstream in(io::read_file(path));
    std::vector<std::string> urls;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        urls.push_back(t);
    }
    return urls;
}

CorpusEntry store_entry(const std::filesystem::path& dir, const std::string& url, int status, std::string_view html,
                        const std::vector<std::optional<std::string>>& stylesheets, std::string fetched_at) {
    CorpusEntry e;
    e.id = entry_id(url);
    e.url = url;
    e.fetched_at = std::move(fetched_at);
    e.http_status = status;
    const auto entry_dir = dir / e.id;
    std::error_code ec;
    std::filesystem::remove_all(entry_dir, ec);
    if (status != 200) return e;

    e.html_path = e.id + "/page.html";
    io::write_file_atomic(dir / e.html_path, html);
    const auto tree = dom::parse_html(html);
    e.language = detect_language(dom::joined_text(tree, tree.root()));
    for (std::size_t n = 0; n < stylesheets.size(); ++n) {
        const std::string rel = e.id + "/css/" + std::to_string(n) + ".css";
        e.stylesheet_paths.push_back(rel);
        if (stylesheets[n]) {
            io::write_file_atomic(dir / rel, *stylesheets[n]);
        } else {
            e.missing_stylesheets.push_back(rel);
        }
    }
    return e;
}

EntryDocument read_entry(const std::filesystem::path& dir, const CorpusEntry& entry) {
    if (entry.html_path.empty()) throw IoError("entry " + entry.id + " has no stored page");
    EntryDocument doc;
    doc.html = io::read_file(inside(dir, entry.html_path));
    for (const auto& rel : entry.stylesheet_paths) {
        const bool missing =
            std::find(entry.missing_stylesheets.begin(), entry.missing_stylesheets.end(), rel) !=
            entry.missing_stylesheets.end();
        if (missing) {
            doc.stylesheets.emplace_back();
            continue;
        }
        try {
            doc.stylesheets.emplace_back(io::read_file(inside(dir, rel)));
        } catch (const IoError&) {
            doc.stylesheets.emplace_back();
        }
    }
    return doc;
}

CorpusManifest crawl(const std::vector<std::string>& urls, const std::filesystem::path& out_dir,
                     const CrawlOptions& options) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    std::vector<std::string> unique;
    for (const auto& u : urls) {
        if (std::find(unique.begin(), unique.end(), u) == unique.end()) unique.push_back(u);
    }
    // One work item per host keeps requests to a host sequential.
    std::vector<std::vector<std::size_t>> groups;
    std::map<std::string, std::size_t> group_of;
    for (std::size_t i = 0; i < unique.size(); ++i) {
        const auto parsed = parse_url(unique[i]);
        const std::string host = parsed ? parsed->host : "\x01" + std::to_string(i);
        auto [it, fresh] = group_of.emplace(host, groups.size());
        if (fresh) groups.emplace_back();
        groups[it->second].push_back(i);
    }

    std::vector<CorpusEntry> entries(unique.size());
    std::mutex mu;
    std::size_t next_group = 0;
    std::exception_ptr io_failure;
    const auto worker = [&] {
        for (;;) {
            std::size_t g = 0;
            {
                std::lock_guard lock(mu);
                if (next_group >= groups.size() || io_failure) return;
                g = next_group++;
            }
            for (const std::size_t i : groups[g]) {
                const std::string& url = unique[i];
                CorpusEntry e;
                try {
                    const auto stamp = utc_timestamp_now();
                    try {
                        const auto page = fetch_page(url, options.fetch);
                        std::vector<std::optional<std::string>> sheets;
                        for (const auto& s : page.stylesheets) sheets.push_back(s.content);
                        e = store_entry(out_dir, url, page.status, page.body, sheets, stamp);
                    } catch (const FetchError& fe) {
                        e = store_entry(out_dir, url, 0, {}, {}, stamp);
                        e.error = fe.kind();
                    }
                    if (options.language_filter && e.http_status == 200) {
                        e.excluded = e.language != *options.language_filter;
                    }
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!io_failure) io_failure = std::current_exception();
                    return;
                }
                entries[i] = std::move(e);
            }
        }
    };
    const std::size_t n_workers = std::min(std::max<std::size_t>(options.max_in_flight, 1), groups.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (io_failure) std::rethrow_exception(io_failure);

    CorpusManifest manifest;
    manifest.language_filter = options.language_filter;
    manifest.entries = std::move(entries);
    write_manifest(out_dir, manifest);
    return manifest;
}

std::string utc_timestamp_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace bannerscope::corpus
