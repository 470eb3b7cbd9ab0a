#include "bannerscope/active.hpp"
#include "bannerscope/clickables.hpp"
#include "bannerscope/error.hpp"
#include "bannerscope/kmeans.hpp"
#include "bannerscope/labels.hpp"
#include "bannerscope/svm.hpp"
#include "bannerscope/tfidf.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace bannerscope::ml;
using bannerscope::SeededRng;

namespace {

LabelRecord rec(std::string text, ButtonClass c, LabelSource s = LabelSource::Manual) {
    return {std::move(text), c, s};
}

} // namespace

TEST_CASE("tokenize") {
    CHECK(tokenize("Alle akzeptieren") == std::vector<std::string>{"alle", "akzeptieren"});
    CHECK(tokenize("yes, i'm happy") == std::vector<std::string>{"yes", "i", "m", "happy"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("Cookie-Einstellungen ÄNDERN 2x") ==
          std::vector<std::string>{"cookie", "einstellungen", "ändern", "2x"});
}

TEST_CASE("vocabulary") {
    const std::vector<std::string> texts{"a b", "b c"};
    const auto v = build_vocabulary(texts, 1);
    CHECK(v.terms() == std::vector<std::string>{"a", "b", "c"});
    CHECK(v.document_frequency() == std::vector<std::size_t>{1, 2, 1});
    CHECK(v.document_count() == 2);
    CHECK(build_vocabulary(texts, 2).terms() == std::vector<std::string>{"b"});
    const auto empty = build_vocabulary(std::vector<std::string>{}, 1);
    CHECK(empty.empty());
    CHECK(empty.document_count() == 0);
    const auto dup = build_vocabulary(std::vector<std::string>{"x x x"}, 1);
    CHECK(dup.document_frequency() == std::vector<std::size_t>{1});
}

TEST_CASE("vectorize uses smoothed idf and unit length") {
    const auto single = build_vocabulary(std::vector<std::string>{"b"}, 1);
    CHECK(single.idf(0) == 1.0);
    const auto v = vectorize("b", single);
    REQUIRE(v.entries.size() == 1);
    CHECK(v.entries[0].second == doctest::Approx(1.0));

    const std::vector<std::string> texts{"accept all", "reject all", "accept", "settings"};
    const auto vocab = build_vocabulary(texts, 1);
    // Oracle: idf = ln((1+N)/(1+df)) + 1, tf raw counts, then L2.
    const double idf_accept = std::log(5.0 / 3.0) + 1, idf_all = std::log(5.0 / 3.0) + 1;
    const double idf_reject = std::log(5.0 / 2.0) + 1;
    CHECK(vocab.idf(*vocab.index_of("reject")) == doctest::Approx(idf_reject).epsilon(1e-12));
    const auto x = vectorize("reject all all", vocab);
    const double n = std::sqrt(idf_reject * idf_reject + 4 * idf_all * idf_all);
    const auto dense = x.to_dense(vocab.size());
    CHECK(dense[*vocab.index_of("reject")] == doctest::Approx(idf_reject / n).epsilon(1e-12));
    CHECK(dense[*vocab.index_of("all")] == doctest::Approx(2 * idf_all / n).epsilon(1e-12));
    CHECK(dense[*vocab.index_of("accept")] == 0.0);
    (void)idf_accept;

    CHECK(vectorize("unknown words only", vocab).empty());
    const auto a = vectorize("accept accept", vocab).to_dense(vocab.size());
    const auto b = vectorize("accept", vocab).to_dense(vocab.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
}

TEST_CASE("tf-idf vectors have unit norm") {
    std::vector<std::string> texts;
    for (const auto& p : default_seed_table()) texts.push_back(p.phrase);
    const auto vocab = build_vocabulary(texts, 1);
    for (const auto& t : texts) {
        const auto v = vectorize(t, vocab);
        CHECK(std::abs(v.norm() - 1.0) <= 1e-9);
        for (const auto& [i, w] : v.entries) CHECK(w >= 0.0);
    }
}

TEST_CASE("kmeans separates two clumps") {
    const std::vector<DenseVector> pts{{0}, {0.1}, {10}, {10.1}};
    const auto r = kmeans(pts, 2, 42);
    CHECK(r.assignments[0] == r.assignments[1]);
    CHECK(r.assignments[2] == r.assignments[3]);
    CHECK(r.assignments[0] != r.assignments[2]);
    CHECK(r.inertia == doctest::Approx(0.01));
    const auto best = oracle::best_partition({{0}, {0.1}, {10}, {10.1}}, 2);
    CHECK(oracle::same_grouping(r.assignments, best.labels));
}

TEST_CASE("kmeans with k equal to the point count has zero inertia") {
    const std::vector<DenseVector> pts{{1, 2}, {3, 4}, {5, 0}};
    CHECK(kmeans(pts, 3, 1).inertia == 0.0);
}

TEST_CASE("kmeans is deterministic and validates k") {
    SeededRng rng(9);
    std::vector<DenseVector> pts(30, DenseVector(3));
    for (auto& p : pts)
        for (auto& v : p) v = rng.uniform();
    const auto a = kmeans(pts, 4, 42), b = kmeans(pts, 4, 42);
    CHECK(a.assignments == b.assignments);
    CHECK(a.inertia == b.inertia);
    CHECK_THROWS_AS(kmeans(pts, 0, 1), bannerscope::InvalidK);
    CHECK_THROWS_AS(kmeans(std::vector<DenseVector>{{1}, {1}}, 2, 1), bannerscope::InvalidK);
    CHECK_THROWS_AS(kmeans(std::vector<DenseVector>{}, 1, 1), bannerscope::InvalidK);
}

TEST_CASE("kmeans inertia never rises and points sit with their nearest centroid") {
    SeededRng rng(21);
    for (int t = 0; t < 100; ++t) {
        std::vector<DenseVector> pts(5 + rng.below(20), DenseVector(2));
        for (auto& p : pts)
            for (auto& v : p) v = 5.0 * rng.uniform();
        const auto r = kmeans(pts, 1 + rng.below(4), t);
        for (std::size_t i = 1; i < r.inertia_history.size(); ++i) {
            CHECK(r.inertia_history[i] <= r.inertia_history[i - 1] + 1e-12);
        }
        double total = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double own = squared_distance(pts[i], r.centroids[r.assignments[i]]);
            total += own;
            for (const auto& c : r.centroids) CHECK(own <= squared_distance(pts[i], c) + 1e-12);
        }
        CHECK(total == doctest::Approx(r.inertia).epsilon(1e-12));
    }
}

TEST_CASE("kmeans reaches the exhaustive optimum on small instances") {
    SeededRng rng(77);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.below(7);
        std::vector<std::vector<double>> pts(n, std::vector<double>(2));
        for (auto& p : pts)
            for (auto& v : p) v = 10.0 * rng.uniform();
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(n, 3));
        const auto best = oracle::best_partition(pts, k);
        CHECK(kmeans(pts, k, 42).inertia == doctest::Approx(best.inertia).epsilon(1e-9));
    }
}

TEST_CASE("seed labels from the shipped table") {
    const auto r = seed_labels({"alle akzeptieren", "Nur notwendige Cookies", "weitere informationen", "Yes, I'm happy"});
    REQUIRE(r.size() == 3);
    CHECK(r[0].label == ButtonClass::Accept);
    CHECK(r[1].label == ButtonClass::Reject);
    CHECK(r[1].text == "nur notwendige cookies");
    CHECK(r[2].label == ButtonClass::Accept);
    for (const auto& x : r) CHECK(x.source == LabelSource::Seed);
    // "alle ablehnen" (2 tokens) beats "alle" matches and the shorter "ablehnen".
    CHECK(seed_labels({"alle ablehnen"})[0].label == ButtonClass::Reject);
    // Containment is on whole tokens, not substrings.
    CHECK(seed_labels({"okay"}).empty());
}

TEST_CASE("seed table parsing") {
    const auto t = parse_seed_table("# x\naccept: Alle Akzeptieren\n\nreject:nein\n");
    REQUIRE(t.size() == 2);
    CHECK(t[0].phrase == "alle akzeptieren");
    CHECK(t[0].tokens == std::vector<std::string>{"alle", "akzeptieren"});
    CHECK_THROWS_AS(parse_seed_table("maybe:x\n"), bannerscope::FormatError);
    CHECK_THROWS_AS(parse_seed_table("accept\n"), bannerscope::FormatError);
    CHECK_THROWS_AS(parse_seed_table("accept: !!\n"), bannerscope::FormatError);
    std::set<ButtonClass> classes;
    for (const auto& p : default_seed_table()) classes.insert(p.label);
    CHECK(classes.size() == 4);
}

TEST_CASE("record merging prefers active over manual over seed") {
    const auto m = merge_training_records({rec("ok", ButtonClass::Accept, LabelSource::Seed),
                                           rec("ok", ButtonClass::Other, LabelSource::Active),
                                           rec("ok", ButtonClass::Reject, LabelSource::Manual),
                                           rec("x", ButtonClass::Other, LabelSource::Manual),
                                           rec("x", ButtonClass::Settings, LabelSource::Manual)});
    REQUIRE(m.size() == 2);
    CHECK(m[0].label == ButtonClass::Other);
    CHECK(m[1].label == ButtonClass::Settings);
}

TEST_CASE("json lines") {
    const auto r = parse_json_line(R"({"text":"  Alle Ablehnen ","label":"reject"})");
    CHECK(r.text == "alle ablehnen");
    CHECK(r.label == ButtonClass::Reject);
    CHECK(r.source == LabelSource::Manual);
    CHECK(parse_json_line(to_json_line(rec("x", ButtonClass::Other, LabelSource::Active))) ==
          rec("x", ButtonClass::Other, LabelSource::Active));
    CHECK_THROWS_AS(parse_json_line("{"), bannerscope::FormatError);
    CHECK_THROWS_AS(parse_json_line(R"({"text":"a","label":"maybe"})"), bannerscope::FormatError);
    CHECK_THROWS_AS(parse_json_line(R"({"text":"a"})"), bannerscope::FormatError);
    CHECK_THROWS_AS(parse_json_line(R"({"text":"!!","label":"other"})"), bannerscope::FormatError);
    CHECK_THROWS_AS(parse_json_line(R"({"text":"a","label":"other","source":"robot"})"), bannerscope::FormatError);
}

TEST_CASE("label store appends durably and dedups per text and source") {
    testsupport::TempDir tmp;
    const auto path = tmp / "sub" / "labels.jsonl";
    {
        LabelStore s(path);
        CHECK(s.records().empty());
        s.append(rec("OK", ButtonClass::Accept));
        s.append(rec("ok", ButtonClass::Other));
        s.append(rec("ok", ButtonClass::Other, LabelSource::Active));
        CHECK_THROWS_AS(s.append(rec("  ", ButtonClass::Other)), bannerscope::PreconditionError);
    }
    LabelStore s(path);
    CHECK(s.line_count() == 3);
    const auto r = s.records();
    REQUIRE(r.size() == 2);
    CHECK(r[0] == rec("ok", ButtonClass::Other));
    CHECK(s.contains_text(" OK "));
    CHECK(s.labeled_texts() == std::set<std::string>{"ok"});

    testsupport::spit(tmp / "bad.jsonl", "{\"text\":\"a\",\"label\":\"other\"}\n\nnot json\n");
    try {
        LabelStore bad(tmp / "bad.jsonl");
        FAIL("expected FormatError");
    } catch (const bannerscope::FormatError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("svm fits a separable set") {
    std::vector<LabelRecord> toy{rec("alpha", ButtonClass::Accept), rec("alpha beta", ButtonClass::Accept),
                                 rec("gamma", ButtonClass::Reject), rec("gamma delta", ButtonClass::Reject),
                                 rec("omega", ButtonClass::Other)};
    const auto m = train_from_records(toy);
    for (const auto& r : toy) CHECK(predict(m, r.text).label == r.label);
    CHECK_FALSE(m.classes[static_cast<std::size_t>(ButtonClass::Settings)].trained);
    for (double w : m.classes[static_cast<std::size_t>(ButtonClass::Settings)].w) CHECK(w == 0.0);
}

TEST_CASE("svm objective of the held model never rises after the first epoch") {
    TrainingTrace trace;
    (void)train_from_records(seed_records(), {}, &trace);
    for (const auto& series : trace.epochs) {
        REQUIRE(series.size() == 50);
        for (std::size_t e = 1; e < series.size(); ++e) CHECK(series[e].retained <= series[e - 1].retained + 1e-6);
    }
}

TEST_CASE("svm objective oracle") {
    const auto vocab = build_vocabulary(std::vector<std::string>{"a", "b"}, 1);
    ClassWeights w;
    w.w = {1.0, -1.0};
    w.bias = 0.5;
    const std::vector<TfIdfVector> xs{vectorize("a", vocab), vectorize("b", vocab)};
    const std::vector<int> ys{1, 1};
    // Scores 1.5 and -0.5; hinge 0 and 1.5; reg 0.5*0.1*(1+1+0.25).
    CHECK(svm_objective(w, xs, ys, 0.1) == doctest::Approx(0.1125 + 0.75));
}

TEST_CASE("svm training is deterministic and serializes losslessly") {
    const auto a = train_from_records(seed_records());
    const auto b = train_from_records(seed_records());
    CHECK(a == b);
    CHECK(model_to_json(a) == model_to_json(b));
    const auto back = model_from_json(model_to_json(a));
    CHECK(back == a);
    testsupport::TempDir tmp;
    save_model(a, tmp / "m.json");
    CHECK(load_model(tmp / "m.json") == a);
    SvmParams other;
    other.seed = 7;
    CHECK_FALSE(train_from_records(seed_records(), other) == a);
}

TEST_CASE("svm validates its inputs") {
    CHECK_THROWS_AS(train_from_records({rec("a", ButtonClass::Accept), rec("b", ButtonClass::Accept)}),
                    bannerscope::InsufficientClasses);
    CHECK_THROWS_AS(train_from_records({}), bannerscope::InsufficientClasses);
    SvmParams bad;
    bad.lambda = 0;
    CHECK_THROWS_AS(train_from_records(seed_records(), bad), bannerscope::PreconditionError);
    CHECK_THROWS_AS(model_from_json("{}"), bannerscope::FormatError);
    CHECK_THROWS_AS(model_from_json("nope"), bannerscope::FormatError);
}

TEST_CASE("model trained on seeds predicts unseen variants") {
    const auto m = train_from_records(seed_records());
    CHECK(predict(m, "alles akzeptieren").label == ButtonClass::Accept);
    CHECK(predict(m, "ablehnen").label == ButtonClass::Reject);
    std::size_t correct = 0;
    const auto seeds = seed_records();
    for (const auto& r : seeds) correct += predict(m, r.text).label == r.label;
    CHECK(static_cast<double>(correct) / static_cast<double>(seeds.size()) >= 0.95);
}

TEST_CASE("predict contracts") {
    const auto m = train_from_records(seed_records());
    const auto p = predict(m, "zzz unknown");
    // Zero vector: the largest bias wins, margin from biases.
    std::array<double, kClassCount> biases{};
    for (std::size_t c = 0; c < kClassCount; ++c) biases[c] = m.classes[c].bias;
    const auto top = std::max_element(biases.begin(), biases.end()) - biases.begin();
    CHECK(static_cast<std::size_t>(p.label) == static_cast<std::size_t>(top));
    auto sorted = biases;
    std::sort(sorted.rbegin(), sorted.rend());
    CHECK(p.margin == doctest::Approx(sorted[0] - sorted[1]));

    const auto q = predict(m, "cookie einstellungen");
    CHECK(q.margin >= 0.0);
    CHECK(q.scores[static_cast<std::size_t>(q.label)] == *std::max_element(q.scores.begin(), q.scores.end()));

    const auto other_vocab = build_vocabulary(std::vector<std::string>{"x"}, 1);
    CHECK_THROWS_AS(predict(m, "ok", other_vocab), bannerscope::DimensionMismatch);
    TfIdfVector out_of_range;
    out_of_range.entries.push_back({static_cast<std::uint32_t>(m.dimension() + 3), 1.0});
    CHECK_THROWS_AS(predict(m, out_of_range), bannerscope::DimensionMismatch);
}

TEST_CASE("ties go to the earlier class") {
    LinearModel m;
    m.vocabulary = build_vocabulary(std::vector<std::string>{"a"}, 1);
    for (auto& c : m.classes) {
        c.w = {0.0};
        c.bias = 1.0;
        c.trained = true;
    }
    const auto p = predict(m, "a");
    CHECK(p.label == ButtonClass::Accept);
    CHECK(p.margin == 0.0);
}

TEST_CASE("argmax is invariant under positive scaling") {
    auto m = train_from_records(seed_records());
    const auto before = predict(m, "alle cookies ablehnen");
    for (auto& c : m.classes) {
        for (double& w : c.w) w *= 3.5;
        c.bias *= 3.5;
    }
    CHECK(predict(m, "alle cookies ablehnen").label == before.label);
}

TEST_CASE("query selection") {
    const auto m = train_from_records(seed_records());
    std::vector<std::string> pool{"alle akzeptieren", "weiter", "zustimmen", "mehr", "info", "ablehnen",
                                  "details anzeigen", "Weiter", "ok"};
    const auto q = select_queries(m, pool, 3);
    REQUIRE(q.size() == 3);
    std::vector<std::pair<double, std::string>> all;
    std::set<std::string> uniq;
    for (const auto& t : pool) {
        const auto n = bannerscope::clickables::normalize_label(t);
        if (uniq.insert(n).second) all.push_back({predict(m, n).margin, n});
    }
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(q[i].text == all[i].second);
        CHECK(q[i].margin == all[i].first);
        CHECK(q[i].predicted == predict(m, q[i].text).label);
    }
    CHECK(select_queries(m, {}, 5).empty());
    CHECK(select_queries(m, pool, 100).size() == uniq.size());
    CHECK_THROWS_AS(select_queries(m, pool, 0), bannerscope::PreconditionError);
}

TEST_CASE("unlabeled pool filters labeled texts") {
    CHECK(unlabeled_pool({"a", "B", "c"}, {"b"}) == std::vector<std::string>{"a", "c"});
}
