#include "bannerscope/error.hpp"
#include "bannerscope/service.hpp"

#include "support.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

using namespace bannerscope;
using nlohmann::json;

namespace {

struct Fixture {
    testsupport::TempDir tmp;
    service::ServiceConfig config;

    Fixture() {
        ml::save_model(ml::train_from_records(ml::seed_records()), tmp / "model.json");
        config.corpus_dir = testsupport::corpus_dir();
        config.model_path = tmp / "model.json";
        config.labels_path = tmp / "labels.jsonl";
    }
};

struct Running {
    service::Service svc;
    int port;
    httplib::Client client;
    explicit Running(const service::ServiceConfig& c)
        : svc(c), port(svc.start("127.0.0.1", 0)), client("127.0.0.1", port) {}
};

json get_json(httplib::Client& c, const std::string& path, int expected = 200) {
    const auto r = c.Get(path);
    REQUIRE(r);
    CHECK(r->status == expected);
    return json::parse(r->body);
}

int post(httplib::Client& c, const std::string& path, const std::string& body) {
    const auto r = c.Post(path, body, "application/json");
    REQUIRE(r);
    return r->status;
}

std::string flagged_entry() {
    for (const auto& e : testsupport::truth())
        if (e.value("expect", "") == "aesthetic_warning") return e["id"];
    throw std::runtime_error("fixture truth has no flagged entry");
}

} // namespace

TEST_CASE("queue respects the limit and orders by margin") {
    Fixture f;
    Running s(f.config);
    const auto q = get_json(s.client, "/api/queue?limit=5");
    REQUIRE(q["items"].size() == 5);
    for (std::size_t i = 1; i < q["items"].size(); ++i)
        CHECK(q["items"][i - 1]["margin"].get<double>() <= q["items"][i]["margin"].get<double>());
    CHECK(q["model_fingerprint"] == s.svc.model_fingerprint());
    CHECK(get_json(s.client, "/api/queue")["items"].size() == 10);
    const auto all = get_json(s.client, "/api/queue?limit=100000")["items"];
    CHECK(all.size() <= 1000);
    CHECK(all.size() > 5);
    for (const char* bad : {"0", "-1", "x", "3x", ""}) get_json(s.client, std::string("/api/queue?limit=") + bad, 400);
}

TEST_CASE("malformed label bodies are rejected") {
    Fixture f;
    Running s(f.config);
    for (const char* body : {"", "nope", "[]", R"({"label":"accept"})", R"({"text":"x"})", R"({"text":1,"label":"accept"})",
                             R"({"text":"x","label":"maybe"})", R"({"text":"  ","label":"other"})",
                             R"({"text":"x","label":"other","source":"robot"})"}) {
        CHECK(post(s.client, "/api/labels", body) == 400);
    }
    CHECK(ml::LabelStore(f.config.labels_path).line_count() == 0);
}

TEST_CASE("labeled texts leave the queue and survive a restart") {
    Fixture f;
    std::string text;
    {
        Running s(f.config);
        const auto q = get_json(s.client, "/api/queue?limit=1");
        REQUIRE(q["items"].size() == 1);
        text = q["items"][0]["text"];
        const auto body = json{{"text", text}, {"label", "other"}}.dump();
        const auto r = s.client.Post("/api/labels", body, "application/json");
        REQUIRE(r);
        CHECK(r->status == 201);
        const auto created = json::parse(r->body);
        CHECK(created["record"]["source"] == "active");
        CHECK(created["stored_records"] == 1);
        for (const auto& item : get_json(s.client, "/api/queue?limit=1000")["items"]) CHECK(item["text"] != text);
    }
    ml::LabelStore store(f.config.labels_path);
    REQUIRE(store.line_count() == 1);
    CHECK(store.records()[0].text == text);
    Running again(f.config);
    for (const auto& item : get_json(again.client, "/api/queue?limit=1000")["items"]) CHECK(item["text"] != text);
}

TEST_CASE("retrain swaps the model and persists it") {
    Fixture f;
    Running s(f.config);
    const auto before = s.svc.model_fingerprint();
    CHECK(post(s.client, "/api/labels", R"({"text":"ganz neuer knopf","label":"reject","source":"manual"})") == 201);
    const auto r = s.client.Post("/api/retrain", "", "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);
    const auto j = json::parse(r->body);
    CHECK(j["model_fingerprint"] != before);
    CHECK(j["model_fingerprint"] == s.svc.model_fingerprint());
    const auto saved = ml::load_model(f.config.model_path);
    CHECK(saved.fingerprint == j["model_fingerprint"]);
    CHECK(ml::predict(saved, "ganz neuer knopf").label == ml::ButtonClass::Reject);
    CHECK(get_json(s.client, "/api/queue?limit=1")["model_fingerprint"] == j["model_fingerprint"]);
}

TEST_CASE("findings and annotated pages") {
    Fixture f;
    Running s(f.config);
    const auto findings = get_json(s.client, "/api/findings");
    REQUIRE(findings["entries"].size() > 0);
    for (const auto& e : findings["entries"]) CHECK(e["findings"].size() > 0);

    const auto id = flagged_entry();
    const auto page = s.client.Get("/api/pages/" + id + "/annotated");
    REQUIRE(page);
    CHECK(page->status == 200);
    CHECK(page->get_header_value("Content-Type").find("text/html") == 0);
    CHECK(page->body.find("outline:3px solid #ff8c00") != std::string::npos);
    CHECK(page->get_header_value("Access-Control-Allow-Origin") == "*");

    CHECK(s.client.Get("/api/pages/ffffffffffffffff/annotated")->status == 404);
    std::string negative;
    for (const auto& e : testsupport::truth())
        if (!e["has_banner"].get<bool>()) negative = e["id"];
    const auto none = s.client.Get("/api/pages/" + negative + "/annotated");
    REQUIRE(none);
    CHECK((none->status == 409 || none->status == 200));
}

TEST_CASE("startup failures") {
    Fixture f;
    auto missing = f.config;
    missing.corpus_dir = f.tmp / "nowhere";
    CHECK_THROWS_AS(service::Service{missing}, IoError);
    auto bad_model = f.config;
    testsupport::spit(f.tmp / "bad.json", "{}");
    bad_model.model_path = f.tmp / "bad.json";
    CHECK_THROWS_AS(service::Service{bad_model}, FormatError);

    Running s(f.config);
    service::Service other(f.config);
    CHECK_THROWS_AS(other.start("127.0.0.1", s.port), Error);
}

TEST_CASE("in-process operations match the endpoints") {
    Fixture f;
    service::Service svc(f.config);
    const auto q = svc.queue(3);
    REQUIRE(q.size() == 3);
    const auto rec = svc.add_label("  " + q[0].text + " ", ml::ButtonClass::Settings);
    CHECK(rec.text == q[0].text);
    for (const auto& item : svc.queue(1000)) CHECK(item.text != q[0].text);
    CHECK_THROWS_AS(svc.add_label("!!", ml::ButtonClass::Other), PreconditionError);
}
