#include "bannerscope/service.hpp"

#include "bannerscope/clickables.hpp"
#include "bannerscope/corpus.hpp"
#include "bannerscope/error.hpp"
#include "bannerscope/report.hpp"

#include <httplib.h>
#include <json.hpp>

#include <charconv>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace bannerscope::service {

namespace {

using Json = nlohmann::ordered_json;

/// Immutable view served to readers; replaced wholesale on every mutation.
struct Snapshot {
    std::shared_ptr<const ml::LinearModel> model;
    std::shared_ptr<const std::vector<pipeline::ScanResult>> results;
    std::shared_ptr<const std::vector<std::string>> pool;
    std::shared_ptr<const std::set<std::string>> labeled;
};

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, Json{{"error", message}});
}

Json query_json(const ml::ActiveQuery& q) {
    return Json{{"text", q.text}, {"predicted", ml::to_string(q.predicted)}, {"margin", q.margin}};
}

} // namespace

struct Service::Impl {
    ServiceConfig config;
    corpus::CorpusManifest manifest;
    ml::LabelStore store;

    mutable std::mutex snapshot_mu;
    std::shared_ptr<const Snapshot> snapshot;
    std::mutex write_mu; // serializes label appends and retrains

    httplib::Server server;
    std::thread thread;
    int port = -1;

    explicit Impl(ServiceConfig c) : config(std::move(c)), store(config.labels_path) {
        manifest = corpus::load_manifest(config.corpus_dir);
        auto model = std::make_shared<const ml::LinearModel>(ml::load_model(config.model_path));
        auto snap = std::make_shared<Snapshot>();
        snap->labeled = std::make_shared<const std::set<std::string>>(store.labeled_texts());
        install_model(*snap, std::move(model));
        snapshot = std::move(snap);
        routes();
    }

    std::shared_ptr<const Snapshot> current() const {
        std::lock_guard lock(snapshot_mu);
        return snapshot;
    }

    void publish(std::shared_ptr<const Snapshot> s) {
        std::lock_guard lock(snapshot_mu);
        snapshot = std::move(s);
    }

    void install_model(Snapshot& snap, std::shared_ptr<const ml::LinearModel> model) const {
        pipeline::ScanOptions options;
        options.model = model.get();
        options.threshold = config.threshold;
        auto results = std::make_shared<const std::vector<pipeline::ScanResult>>(
            pipeline::scan_corpus(config.corpus_dir, manifest, options));
        snap.pool = std::make_shared<const std::vector<std::string>>(pipeline::label_pool(*results));
        snap.results = std::move(results);
        snap.model = std::move(model);
    }

    std::vector<ml::ActiveQuery> queue(std::size_t limit) const {
        const auto snap = current();
        const auto pool = ml::unlabeled_pool(*snap->pool, *snap->labeled);
        if (pool.empty()) return {};
        return ml::select_queries(*snap->model, pool, std::max<std::size_t>(limit, 1));
    }

    ml::LabelRecord add_label(const std::string& text, ml::ButtonClass label, ml::LabelSource source) {
        std::lock_guard lock(write_mu);
        const ml::LabelRecord record = store.append({text, label, source});
        auto snap = std::make_shared<Snapshot>(*current());
        auto labeled = std::make_shared<std::set<std::string>>(*snap->labeled);
        labeled->insert(record.text);
        snap->labeled = std::move(labeled);
        publish(std::move(snap));
        return record;
    }

    std::string retrain() {
        std::lock_guard lock(write_mu);
        const auto records = pipeline::training_records(store.records());
        auto model = std::make_shared<const ml::LinearModel>(ml::train_from_records(records, config.params));
        ml::save_model(*model, config.model_path);
        auto snap = std::make_shared<Snapshot>(*current());
        install_model(*snap, std::move(model));
        const std::string fp = snap->model->fingerprint;
        publish(std::move(snap));
        return fp;
    }

    void routes() {
        // SO_REUSEADDR only: with SO_REUSEPORT a second server could share a busy port.
        server.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
        });
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                    {"Access-Control-Allow-Headers", "Content-Type"},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
        server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

        server.Get("/api/queue", [this](const httplib::Request& req, httplib::Response& res) {
            std::size_t limit = config.default_queue_limit;
            if (req.has_param("limit")) {
                const auto v = req.get_param_value("limit");
                std::size_t parsed = 0;
                const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
                if (ec != std::errc() || p != v.data() + v.size() || parsed == 0) {
                    return send_error(res, 400, "limit must be a positive integer");
                }
                limit = std::min(parsed, config.max_queue_limit);
            }
            const auto snap = current();
            auto items = Json::array();
            for (const auto& q : queue(limit)) items.push_back(query_json(q));
            send_json(res, 200, Json{{"model_fingerprint", snap->model->fingerprint}, {"items", std::move(items)}});
        });

        server.Post("/api/labels", [this](const httplib::Request& req, httplib::Response& res) {
            const auto body = nlohmann::json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object()) return send_error(res, 400, "body must be a JSON object");
            if (!body.contains("text") || !body["text"].is_string()) {
                return send_error(res, 400, "'text' must be a string");
            }
            if (!body.contains("label") || !body["label"].is_string()) {
                return send_error(res, 400, "'label' must be one of accept, reject, settings, other");
            }
            const auto label = ml::parse_button_class(body["label"].get<std::string>());
            if (!label) return send_error(res, 400, "'label' must be one of accept, reject, settings, other");
            ml::LabelSource source = ml::LabelSource::Active;
            if (body.contains("source")) {
                const auto s = body["source"].is_string() ? ml::parse_label_source(body["source"].get<std::string>())
                                                          : std::nullopt;
                if (!s) return send_error(res, 400, "'source' must be seed, manual or active");
                source = *s;
            }
            const std::string text = body["text"].get<std::string>();
            if (clickables::normalize_label(text).empty()) return send_error(res, 400, "'text' is empty");
            const auto record = add_label(text, *label, source);
            send_json(res, 201,
                      Json{{"record",
                            {{"text", record.text},
                             {"label", ml::to_string(record.label)},
                             {"source", ml::to_string(record.source)}}},
                           {"stored_records", store_size()}});
        });

        server.Post("/api/retrain", [this](const httplib::Request&, httplib::Response& res) {
            const std::string fp = retrain();
            const auto snap = current();
            send_json(res, 200,
                      Json{{"model_fingerprint", fp},
                           {"vocabulary_size", snap->model->dimension()},
                           {"queue_size", ml::unlabeled_pool(*snap->pool, *snap->labeled).size()}});
        });

        server.Get("/api/findings", [this](const httplib::Request&, httplib::Response& res) {
            const auto snap = current();
            res.status = 200;
            res.set_content(pipeline::findings_to_json(*snap->results), "application/json; charset=utf-8");
        });

        server.Get(R"(/api/pages/([0-9A-Za-z_-]+)/annotated)", [this](const httplib::Request& req,
                                                                        httplib::Response& res) {
            const std::string id = req.matches[1];
            const auto snap = current();
            const auto* entry = manifest.find(id);
            const pipeline::ScanResult* scan = nullptr;
            for (const auto& r : *snap->results) {
                if (r.entry_id == id) scan = &r;
            }
            if (!entry || !scan) return send_error(res, 404, "no corpus entry " + id);
            try {
                const auto doc = corpus::read_entry(config.corpus_dir, *entry);
                res.status = 200;
                res.set_content(pipeline::annotate_document(doc.html, *scan), "text/html; charset=utf-8");
            } catch (const MissingBanner& e) {
                send_error(res, 409, e.what());
            } catch (const IoError& e) {
                send_error(res, 404, e.what());
            }
        });

        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                send_error(res, 500, e.what());
            } catch (...) {
                send_error(res, 500, "internal error");
            }
        });
    }

    std::size_t store_size() {
        std::lock_guard lock(write_mu);
        return store.line_count();
    }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
    if (impl_->thread.joinable()) throw PreconditionError("service already started");
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound <= 0) throw Error("cannot listen on " + host + ":" + std::to_string(port));
    impl_->port = bound;
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void Service::wait() {
    if (impl_->thread.joinable()) impl_->thread.join();
}

void Service::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

std::vector<ml::ActiveQuery> Service::queue(std::size_t limit) const { return impl_->queue(limit); }

ml::LabelRecord Service::add_label(const std::string& text, ml::ButtonClass label, ml::LabelSource source) {
    return impl_->add_label(text, label, source);
}

std::string Service::retrain() { return impl_->retrain(); }

std::string Service::model_fingerprint() const { return impl_->current()->model->fingerprint; }

} // namespace bannerscope::service
