#include "bannerscope/cli.hpp"

#include "bannerscope/active.hpp"
#include "bannerscope/corpus.hpp"
#include "bannerscope/error.hpp"
#include "bannerscope/io.hpp"
#include "bannerscope/kmeans.hpp"
#include "bannerscope/labels.hpp"
#include "bannerscope/pipeline.hpp"
#include "bannerscope/report.hpp"
#include "bannerscope/service.hpp"
#include "bannerscope/svm.hpp"
#include "bannerscope/text_util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>
#include <sstream>

namespace bannerscope::cli {

namespace {

namespace fs = std::filesystem;

struct Streams {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

struct CrawlArgs {
    std::string urls;
    std::string out;
    double timeout = 10.0;
    std::string lang;
    std::size_t parallel = 8;
};

struct ScanArgs {
    std::string corpus;
    std::string report;
    std::string lexicon;
};

struct ClusterArgs {
    std::string corpus;
    std::size_t k = 6;
    std::uint64_t seed = 42;
    std::string out;
    std::string lexicon;
};

struct TrainArgs {
    std::string labels;
    std::string model;
    double lambda = 1e-3;
    int epochs = 50;
    std::uint64_t seed = 42;
};

struct AnalyzeArgs {
    std::string corpus;
    std::string model;
    std::string report;
    double threshold = 20.0;
    std::string annotate;
    std::string lexicon;
};

struct LabelArgs {
    std::string model;
    std::string pool;
    std::size_t batch = 10;
    std::string labels;
};

struct ServeArgs {
    int port = 8080;
    std::string host = "127.0.0.1";
    std::string corpus;
    std::string model;
    std::string labels;
    double threshold = 20.0;
};

/// Raised for semantically invalid arguments that CLI11 cannot check.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<banner::KeywordLexicon> lexicon_arg(const std::string& path) {
    if (path.empty()) return std::nullopt;
    return banner::load_lexicon(path);
}

int do_crawl(const CrawlArgs& a, Streams& s) {
    corpus::CrawlOptions options;
    options.fetch.timeout_s = a.timeout;
    options.max_in_flight = a.parallel;
    if (!a.lang.empty()) {
        options.language_filter = corpus::parse_language(a.lang);
        if (!options.language_filter || *options.language_filter == corpus::PageLanguage::Unknown) {
            throw UsageError("--lang must be de or en");
        }
    }
    const auto urls = corpus::read_url_list(a.urls);
    const auto manifest = corpus::crawl(urls, a.out, options);
    std::size_t ok = 0;
    for (const auto& e : manifest.entries) ok += e.http_status == 200;
    s.out << "crawled " << manifest.entries.size() << " urls, " << ok << " pages stored in " << a.out << "\n";
    return kExitOk;
}

int do_scan(const ScanArgs& a, Streams& s) {
    const auto lexicon = lexicon_arg(a.lexicon);
    pipeline::ScanOptions options;
    if (lexicon) options.lexicon = &*lexicon;
    const auto manifest = corpus::load_manifest(a.corpus);
    const auto results = pipeline::scan_corpus(a.corpus, manifest, options);
    io::write_file_atomic(a.report, pipeline::report_to_json(results, {"scan", std::nullopt, std::nullopt}));
    std::size_t banners = 0;
    for (const auto& r : results) banners += r.banner.has_value();
    s.out << "scanned " << results.size() << " entries, " << banners << " banners\n";
    return kExitOk;
}

int do_cluster(const ClusterArgs& a, Streams& s) {
    const auto lexicon = lexicon_arg(a.lexicon);
    pipeline::ScanOptions options;
    if (lexicon) options.lexicon = &*lexicon;
    const auto manifest = corpus::load_manifest(a.corpus);
    const auto texts = pipeline::label_pool(pipeline::scan_corpus(a.corpus, manifest, options));
    const auto vocab = ml::build_vocabulary(texts, 1);
    std::vector<ml::DenseVector> vectors;
    for (const auto& t : texts) vectors.push_back(ml::vectorize(t, vocab).to_dense(vocab.size()));
    const auto result = ml::kmeans(vectors, a.k, a.seed);

    std::map<std::string, ml::ButtonClass> seeded;
    for (const auto& r : ml::seed_labels(texts)) seeded.emplace(r.text, r.label);
    nlohmann::ordered_json j;
    j["k"] = a.k;
    j["seed"] = a.seed;
    j["texts"] = texts.size();
    j["inertia"] = result.inertia;
    j["iterations"] = result.iterations;
    auto clusters = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < a.k; ++c) {
        nlohmann::ordered_json cj;
        auto members = nlohmann::ordered_json::array();
        std::map<std::string, int> seed_counts;
        for (std::size_t i = 0; i < texts.size(); ++i) {
            if (result.assignments[i] != c) continue;
            members.push_back(texts[i]);
            const auto it = seeded.find(texts[i]);
            ++seed_counts[it == seeded.end() ? "unlabeled" : std::string(ml::to_string(it->second))];
        }
        cj["cluster"] = c;
        cj["size"] = members.size();
        cj["seed_labels"] = seed_counts;
        cj["members"] = std::move(members);
        clusters.push_back(std::move(cj));
    }
    j["clusters"] = std::move(clusters);
    io::write_file_atomic(a.out, j.dump(2) + "\n");
    s.out << "clustered " << texts.size() << " labels into " << a.k << " clusters\n";
    return kExitOk;
}

ml::SvmParams params_of(double lambda, int epochs, std::uint64_t seed) {
    if (!(lambda > 0)) throw UsageError("--lambda must be positive");
    if (epochs < 1) throw UsageError("--epochs must be at least 1");
    ml::SvmParams p;
    p.lambda = lambda;
    p.epochs = epochs;
    p.seed = seed;
    return p;
}

int do_train(const TrainArgs& a, Streams& s) {
    const auto params = params_of(a.lambda, a.epochs, a.seed);
    if (!fs::exists(a.labels)) throw IoError("label file " + a.labels + " does not exist");
    const ml::LabelStore store(a.labels);
    const auto records = pipeline::training_records(store.records());
    const auto model = ml::train_from_records(records, params);
    ml::save_model(model, a.model);
    s.out << "trained on " << records.size() << " records (" << model.dimension() << " terms), fingerprint "
          << model.fingerprint << "\n";
    return kExitOk;
}

int do_analyze(const AnalyzeArgs& a, Streams& s) {
    if (!(a.threshold >= 0 && a.threshold <= 100)) throw UsageError("--threshold must lie in [0, 100]");
    const auto lexicon = lexicon_arg(a.lexicon);
    const auto model = ml::load_model(a.model);
    pipeline::ScanOptions options;
    if (lexicon) options.lexicon = &*lexicon;
    options.model = &model;
    options.threshold = a.threshold;
    const auto manifest = corpus::load_manifest(a.corpus);
    const auto results = pipeline::scan_corpus(a.corpus, manifest, options);
    io::write_file_atomic(a.report, pipeline::report_to_json(results, {"analyze", a.threshold, model.fingerprint}));
    std::size_t findings = 0;
    std::size_t annotated = 0;
    for (const auto& r : results) {
        findings += r.findings.size();
        if (a.annotate.empty() || !r.banner || !r.accept_node) continue;
        const auto* entry = manifest.find(r.entry_id);
        const auto doc = corpus::read_entry(a.corpus, *entry);
        io::write_file_atomic(fs::path(a.annotate) / (r.entry_id + ".html"), pipeline::annotate_document(doc.html, r));
        ++annotated;
    }
    s.out << "analyzed " << results.size() << " entries, " << findings << " findings";
    if (!a.annotate.empty()) s.out << ", " << annotated << " annotated pages";
    s.out << "\n";
    return kExitOk;
}

std::optional<ml::ButtonClass> answer_class(const std::string& answer) {
    if (answer == "a") return ml::ButtonClass::Accept;
    if (answer == "r") return ml::ButtonClass::Reject;
    if (answer == "s") return ml::ButtonClass::Settings;
    if (answer == "o") return ml::ButtonClass::Other;
    return ml::parse_button_class(answer);
}

int do_label(const LabelArgs& a, Streams& s) {
    if (a.batch == 0) throw UsageError("--batch must be at least 1");
    const fs::path labels_path = a.labels.empty() ? fs::path(a.model).parent_path() / "labels.jsonl" : fs::path(a.labels);
    ml::LabelStore store(labels_path);
    auto model = ml::load_model(a.model);
    std::vector<std::string> pool;
    {
        std::istringstream lines(io::read_file(a.pool));
        for (std::string line; std::getline(lines, line);) pool.push_back(line);
    }
    for (;;) {
        const auto unlabeled = ml::unlabeled_pool(pool, store.labeled_texts());
        if (unlabeled.empty()) {
            s.out << "nothing left to label\n";
            return kExitOk;
        }
        const auto queries = ml::select_queries(model, unlabeled, a.batch);
        std::size_t added = 0;
        bool quit = false;
        for (std::size_t i = 0; i < queries.size() && !quit; ++i) {
            const auto& q = queries[i];
            s.out << "[" << (i + 1) << "/" << queries.size() << "] \"" << q.text << "\"  predicted "
                  << ml::to_string(q.predicted) << ", margin " << q.margin << "\n"
                  << "  a=accept r=reject s=settings o=other, empty=skip, q=quit > " << std::flush;
            std::string answer;
            if (!std::getline(s.in, answer)) {
                quit = true;
                break;
            }
            answer = text::collapse_whitespace(answer);
            if (answer == "q") {
                quit = true;
            } else if (const auto cls = answer_class(answer)) {
                store.append({q.text, *cls, ml::LabelSource::Active});
                ++added;
            } else if (!answer.empty()) {
                s.out << "  unrecognized answer, skipped\n";
            }
        }
        if (added > 0) {
            model = ml::train_from_records(pipeline::training_records(store.records()), model.params);
            ml::save_model(model, a.model);
            s.out << "stored " << added << " labels, retrained (fingerprint " << model.fingerprint << ")\n";
        }
        if (quit || added == 0) return kExitOk;
    }
}

int do_serve(const ServeArgs& a, Streams& s) {
    if (a.port < 0 || a.port > 65535) throw UsageError("--port must lie in [0, 65535]");
    service::ServiceConfig config;
    config.corpus_dir = a.corpus;
    config.model_path = a.model;
    config.labels_path = a.labels;
    config.threshold = a.threshold;
    config.params = ml::load_model(a.model).params;
    service::Service svc(config);
    const int port = svc.start(a.host, a.port);
    s.out << "serving on http://" << a.host << ":" << port << "\n" << std::flush;
    svc.wait();
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    Streams streams{in, out, err};
    CLI::App app{"Detects cookie banners and the styling tricks in their consent buttons."};
    app.name("bannerscope");
    app.require_subcommand(1);

    CrawlArgs crawl;
    auto* c = app.add_subcommand("crawl", "Fetch pages and their stylesheets into a corpus directory");
    c->add_option("--urls", crawl.urls, "File with one URL per line")->required();
    c->add_option("--out", crawl.out, "Corpus directory")->required();
    c->add_option("--timeout", crawl.timeout, "Per-request timeout in seconds")->capture_default_str();
    c->add_option("--lang", crawl.lang, "Mark pages not in this language (de|en) as excluded");
    c->add_option("--parallel", crawl.parallel, "Maximum concurrent fetches")->capture_default_str();

    ScanArgs scan;
    auto* sc = app.add_subcommand("scan", "Detect banners and buttons in a corpus");
    sc->add_option("--corpus", scan.corpus, "Corpus directory")->required();
    sc->add_option("--report", scan.report, "Output report (JSON)")->required();
    sc->add_option("--lexicon", scan.lexicon, "Keyword lexicon file");

    ClusterArgs cluster;
    auto* cl = app.add_subcommand("cluster", "Group the corpus' button labels with k-means");
    cl->add_option("--corpus", cluster.corpus, "Corpus directory")->required();
    cl->add_option("--k", cluster.k, "Number of clusters")->capture_default_str();
    cl->add_option("--seed", cluster.seed, "Random seed")->capture_default_str();
    cl->add_option("--out", cluster.out, "Output file (JSON)")->required();
    cl->add_option("--lexicon", cluster.lexicon, "Keyword lexicon file");

    TrainArgs train;
    auto* t = app.add_subcommand("train", "Train the button classifier on the seed table plus a label file");
    t->add_option("--labels", train.labels, "Label store (JSON lines)")->required();
    t->add_option("--model", train.model, "Output model file")->required();
    t->add_option("--lambda", train.lambda, "Regularization strength")->capture_default_str();
    t->add_option("--epochs", train.epochs, "Passes over the data")->capture_default_str();
    t->add_option("--seed", train.seed, "Shuffling seed")->capture_default_str();

    AnalyzeArgs analyze;
    auto* an = app.add_subcommand("analyze", "Classify buttons and report dark-pattern findings");
    an->add_option("--corpus", analyze.corpus, "Corpus directory")->required();
    an->add_option("--model", analyze.model, "Model file")->required();
    an->add_option("--report", analyze.report, "Output report (JSON)")->required();
    an->add_option("--threshold", analyze.threshold, "Dissimilarity threshold (0-100)")->capture_default_str();
    an->add_option("--annotate", analyze.annotate, "Write annotated pages to this directory");
    an->add_option("--lexicon", analyze.lexicon, "Keyword lexicon file");

    LabelArgs label;
    auto* lb = app.add_subcommand("label", "Label the least certain texts of a pool in the terminal");
    lb->add_option("--model", label.model, "Model file, rewritten after each batch")->required();
    lb->add_option("--pool", label.pool, "File with one text per line")->required();
    lb->add_option("--batch", label.batch, "Texts per round")->capture_default_str();
    lb->add_option("--labels", label.labels, "Label store (default: labels.jsonl next to the model)");

    ServeArgs serve;
    auto* sv = app.add_subcommand("serve", "Serve the labeling and findings API");
    sv->add_option("--port", serve.port, "TCP port (0 picks a free one)")->capture_default_str();
    sv->add_option("--host", serve.host, "Address to bind")->capture_default_str();
    sv->add_option("--corpus", serve.corpus, "Corpus directory")->required();
    sv->add_option("--model", serve.model, "Model file, rewritten on retrain")->required();
    sv->add_option("--labels", serve.labels, "Label store (JSON lines)")->required();
    sv->add_option("--threshold", serve.threshold, "Dissimilarity threshold (0-100)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (*c) return do_crawl(crawl, streams);
        if (*sc) return do_scan(scan, streams);
        if (*cl) return do_cluster(cluster, streams);
        if (*t) return do_train(train, streams);
        if (*an) return do_analyze(analyze, streams);
        if (*lb) return do_label(label, streams);
        if (*sv) return do_serve(serve, streams);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const FetchError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const bannerscope::Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}

} // namespace bannerscope::cli
