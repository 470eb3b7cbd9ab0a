#include "bannerscope/dark_pattern.hpp"
#include "bannerscope/error.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace bannerscope;
using namespace bannerscope::dark;
using clickables::ClickableElement;
using css::ColorRgba;
using dom::NodeId;
using ml::ButtonClass;
using ml::Prediction;
using testsupport::by_id;

namespace {

struct Page {
    dom::DomTree tree;
    css::StyleMap styles;
    explicit Page(std::string_view html)
        : tree(dom::parse_html(html)), styles(tree, css::collect_document_rules(tree)) {}
};

ClickableElement click(NodeId n) { return {n, "button", "", clickables::DetectionSource::Tag}; }

Prediction pred(ButtonClass c, double margin) {
    Prediction p;
    p.label = c;
    p.margin = margin;
    return p;
}

constexpr ColorRgba rgb(int r, int g, int b) {
    return {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g), static_cast<std::uint8_t>(b), 1.0};
}

StyleProfile profile(ColorRgba bg, ColorRgba fg, double size, bool border, double prominence) {
    StyleProfile p;
    p.effective_background = bg;
    p.text_color = fg;
    p.font_size = size;
    p.border_present = border;
    p.prominence = prominence;
    return p;
}

constexpr std::string_view kBright = R"(<div id="b" style="background-color:#052962;color:#fff">
<p>Wir verwenden Cookies.</p>
<div id="row"><button id="acc" style="background-color:#ffe500;color:#052962">Alle akzeptieren</button>
<span><button id="rej" style="background-color:#0a3778;color:#fff">Ablehnen</button></span></div></div>)";

constexpr std::string_view kEqual = R"(<div id="b" style="background-color:#fff">
<button id="acc" style="background-color:#333;color:#fff">Accept</button>
<button id="rej" style="background-color:#333;color:#fff">Reject</button></div>)";

} // namespace

TEST_CASE("pairing picks the highest margin per class") {
    const std::vector<ClickableElement> c{click(NodeId{1}), click(NodeId{2}), click(NodeId{3}), click(NodeId{4})};
    const auto p = pair_buttons(c, {pred(ButtonClass::Accept, 0.3), pred(ButtonClass::Reject, 0.5),
                                    pred(ButtonClass::Accept, 0.8), pred(ButtonClass::Settings, 2.0)});
    REQUIRE(p);
    CHECK(p->accept == 2);
    CHECK(p->reject == 1);
    CHECK_FALSE(pair_buttons(c, {pred(ButtonClass::Accept, 1), pred(ButtonClass::Other, 1),
                                 pred(ButtonClass::Settings, 1), pred(ButtonClass::Accept, 1)}));
    const auto tie = best_of_class({pred(ButtonClass::Accept, 0.4), pred(ButtonClass::Accept, 0.4)}, ButtonClass::Accept);
    CHECK(tie == 0u);
    CHECK_THROWS_AS(pair_buttons(c, {pred(ButtonClass::Accept, 1)}), PreconditionError);
    CHECK_FALSE(pair_buttons({}, {}));
}

TEST_CASE("visual profile resolves the effective background") {
    Page p(kBright);
    const auto root = by_id(p.tree, "b");
    const auto bg = banner_background(p.tree, root, p.styles);
    CHECK(bg == rgb(5, 41, 98));

    const auto acc = visual_profile(p.tree, by_id(p.tree, "acc"), p.styles, root, bg);
    CHECK(acc.effective_background == rgb(255, 229, 0));
    CHECK(acc.text_color == rgb(5, 41, 98));
    CHECK(acc.prominence == doctest::Approx(oracle::contrast({255, 229, 0}, {5, 41, 98})).epsilon(1e-12));

    Page t(R"(<div id="b" style="background-color:#052962"><span><button id="x">OK</button></span></div>)");
    const auto troot = by_id(t.tree, "b");
    const auto tbg = banner_background(t.tree, troot, t.styles);
    const auto x = visual_profile(t.tree, by_id(t.tree, "x"), t.styles, troot, tbg);
    CHECK(x.effective_background == rgb(5, 41, 98));
    CHECK(x.prominence == 1.0);
}

TEST_CASE("ancestor walk stops at the banner root") {
    Page p(R"(<div style="background-color:#ff0000"><div id="b"><button id="x">OK</button></div></div>)");
    const auto root = by_id(p.tree, "b");
    const auto x = visual_profile(p.tree, by_id(p.tree, "x"), p.styles, root, rgb(1, 2, 3));
    CHECK(x.effective_background == rgb(1, 2, 3));
    const auto bg = banner_background(p.tree, root, p.styles);
    CHECK(bg == rgb(255, 0, 0));

    Page none(R"(<div id="b"><button id="x">OK</button></div>)");
    const auto nroot = by_id(none.tree, "b");
    CHECK(banner_background(none.tree, nroot, none.styles) == ColorRgba::white());
}

TEST_CASE("nearly transparent backgrounds are skipped") {
    Page p(R"x(<div id="b" style="background-color:#123456"><button id="x" style="background-color:rgba(255,0,0,0.05)">OK</button>
<button id="y" style="background-color:rgba(255,0,0,0.1)">No</button></div>)x");
    const auto root = by_id(p.tree, "b");
    const auto bg = banner_background(p.tree, root, p.styles);
    CHECK(visual_profile(p.tree, by_id(p.tree, "x"), p.styles, root, bg).effective_background == rgb(0x12, 0x34, 0x56));
    CHECK(visual_profile(p.tree, by_id(p.tree, "y"), p.styles, root, bg).effective_background.r == 255);
}

TEST_CASE("dissimilarity components match the formula oracles") {
    const auto banner = rgb(5, 41, 98);
    const double prom_a = oracle::contrast({255, 229, 0}, {5, 41, 98});
    const auto a = profile(rgb(255, 229, 0), rgb(5, 41, 98), 16, false, prom_a);
    const auto r = profile(banner, rgb(255, 255, 255), 14, true, 1.0);
    const auto s = dissimilarity(a, r);
    const double bg = oracle::delta_e({255, 229, 0}, {5, 41, 98});
    const double fg = oracle::delta_e({5, 41, 98}, {255, 255, 255});
    const double size = std::abs(std::log(16.0 / 14.0)) + 0.5;
    CHECK(s.bg_delta_e == doctest::Approx(bg).epsilon(1e-5));
    CHECK(s.text_delta_e == doctest::Approx(fg).epsilon(1e-5));
    CHECK(s.prominence_gap == doctest::Approx(prom_a - 1.0).epsilon(1e-12));
    CHECK(s.size_component == doctest::Approx(size).epsilon(1e-12));
    const double expected = std::min(100.0, 0.5 * bg + 0.2 * fg + 3.0 * (prom_a - 1.0) + 10.0 * size);
    CHECK(s.total == doctest::Approx(expected).epsilon(1e-5));
    CHECK(s.total > 25.0);
}

TEST_CASE("identical profiles score zero") {
    const auto a = profile(rgb(10, 20, 30), rgb(200, 200, 200), 15, true, 3.0);
    const auto s = dissimilarity(a, a);
    CHECK(s.bg_delta_e == 0.0);
    CHECK(s.text_delta_e == 0.0);
    CHECK(s.prominence_gap == 0.0);
    CHECK(s.size_component == 0.0);
    CHECK(s.total == 0.0);
}

TEST_CASE("dissimilarity is zero only for identical compared fields") {
    SeededRng rng(3);
    auto color = [&] { return rgb(int(rng.below(4)) * 80, int(rng.below(4)) * 80, int(rng.below(4)) * 80); };
    for (int i = 0; i < 500; ++i) {
        const auto a = profile(color(), color(), 12.0 + rng.below(3), rng.below(2) == 1, 1.0 + rng.below(3));
        const auto b = profile(color(), color(), 12.0 + rng.below(3), rng.below(2) == 1, 1.0 + rng.below(3));
        const auto s = dissimilarity(a, b);
        CHECK(s.bg_delta_e >= 0);
        CHECK(s.text_delta_e >= 0);
        CHECK(s.prominence_gap >= 0);
        CHECK(s.size_component >= 0);
        CHECK(s.total >= 0);
        CHECK(s.total <= 100);
        const bool same = a.effective_background.same_rgb(b.effective_background) &&
                          a.text_color.same_rgb(b.text_color) && a.font_size == b.font_size &&
                          a.border_present == b.border_present && a.prominence <= b.prominence;
        CHECK((s.total == 0.0) == same);
    }
}

TEST_CASE("prominence gap is directional") {
    const auto a = profile(rgb(0, 0, 0), rgb(0, 0, 0), 16, false, 12.0);
    const auto r = profile(rgb(0, 0, 0), rgb(0, 0, 0), 16, false, 2.0);
    CHECK(dissimilarity(a, r).prominence_gap == doctest::Approx(10.0));
    CHECK(dissimilarity(a, r).total == doctest::Approx(30.0));
    CHECK(dissimilarity(r, a).prominence_gap == 0.0);
    CHECK(dissimilarity(r, a).total == 0.0);
}

TEST_CASE("total is clamped") {
    const auto a = profile(rgb(255, 255, 255), rgb(0, 0, 0), 40, true, 21.0);
    const auto r = profile(rgb(0, 0, 0), rgb(255, 255, 255), 8, false, 1.0);
    CHECK(dissimilarity(a, r).total == 100.0);
}

TEST_CASE("bright accept against a background-shade reject is a warning") {
    Page p(kBright);
    const auto root = by_id(p.tree, "b");
    const auto acc = by_id(p.tree, "acc"), rej = by_id(p.tree, "rej");
    const auto f = detect_findings(p.tree, root, {click(acc), click(rej)},
                                   {pred(ButtonClass::Accept, 1.0), pred(ButtonClass::Reject, 1.0)}, p.styles, 20.0);
    REQUIRE(f.size() == 1);
    CHECK(f[0].kind == FindingKind::AestheticManipulation);
    CHECK(f[0].severity == Severity::Warning);
    CHECK(f[0].accept_node == acc);
    CHECK(f[0].reject_node == rej);
    REQUIRE(f[0].lca);
    CHECK(*f[0].lca == oracle::lca(p.tree, acc, rej));
    CHECK(*f[0].lca == by_id(p.tree, "row"));
    REQUIRE(f[0].score);
    CHECK(f[0].score->total >= 20.0);
    CHECK_FALSE(f[0].explanation.empty());
}

TEST_CASE("equally styled buttons produce no finding") {
    Page p(kEqual);
    const auto f = detect_findings(p.tree, by_id(p.tree, "b"), {click(by_id(p.tree, "acc")), click(by_id(p.tree, "rej"))},
                                   {pred(ButtonClass::Accept, 1.0), pred(ButtonClass::Reject, 1.0)}, p.styles, 0.0);
    CHECK(f.empty());
}

TEST_CASE("a more prominent reject is only a notice") {
    Page p(kBright);
    const auto acc = by_id(p.tree, "acc"), rej = by_id(p.tree, "rej");
    const auto f = detect_findings(p.tree, by_id(p.tree, "b"), {click(acc), click(rej)},
                                   {pred(ButtonClass::Reject, 1.0), pred(ButtonClass::Accept, 1.0)}, p.styles, 20.0);
    REQUIRE(f.size() == 1);
    CHECK(f[0].severity == Severity::Notice);
    CHECK(f[0].score->prominence_gap == 0.0);
}

TEST_CASE("accept without reject is a missing-reject warning") {
    Page p(kBright);
    const auto acc = by_id(p.tree, "acc");
    const auto f = detect_findings(p.tree, by_id(p.tree, "b"), {click(acc), click(by_id(p.tree, "rej"))},
                                   {pred(ButtonClass::Accept, 1.0), pred(ButtonClass::Settings, 1.0)}, p.styles);
    REQUIRE(f.size() == 1);
    CHECK(f[0].kind == FindingKind::MissingRejectFirstLayer);
    CHECK(f[0].severity == Severity::Warning);
    CHECK(f[0].accept_node == acc);
    CHECK_FALSE(f[0].reject_node);
    CHECK_FALSE(f[0].score);

    CHECK(detect_findings(p.tree, by_id(p.tree, "b"), {}, {}, p.styles).empty());
}

TEST_CASE("finding sets shrink as the threshold grows") {
    Page p(kBright);
    const auto root = by_id(p.tree, "b");
    const std::vector<ClickableElement> c{click(by_id(p.tree, "acc")), click(by_id(p.tree, "rej"))};
    const std::vector<Prediction> pr{pred(ButtonClass::Accept, 1.0), pred(ButtonClass::Reject, 1.0)};
    std::size_t previous = 1;
    for (double tau = 0.0; tau <= 100.0; tau += 2.5) {
        const auto n = detect_findings(p.tree, root, c, pr, p.styles, tau).size();
        CHECK(n <= previous);
        previous = n;
    }
    CHECK(detect_findings(p.tree, root, c, pr, p.styles, 0.0).size() == 1);
    CHECK_THROWS_AS(detect_findings(p.tree, root, c, pr, p.styles, -1.0), PreconditionError);
    CHECK_THROWS_AS(detect_findings(p.tree, root, c, pr, p.styles, 100.5), PreconditionError);
}

TEST_CASE("finding names") {
    CHECK(to_string(FindingKind::AestheticManipulation) == "aesthetic_manipulation");
    CHECK(to_string(FindingKind::MissingRejectFirstLayer) == "missing_reject_first_layer");
    CHECK(to_string(Severity::Notice) == "notice");
    CHECK(to_string(Severity::Warning) == "warning");
}
