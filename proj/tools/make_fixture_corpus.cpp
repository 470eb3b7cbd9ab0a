// Writes the synthetic test corpus: 30 pages with a consent banner in varied
// positions, styles and languages, 10 pages without one, and truth.json with
// the annotated banner root of every page.
//
//   make_fixture_corpus <corpus_dir> <truth_json>

#include "bannerscope/corpus.hpp"
#include "bannerscope/dom.hpp"
#include "bannerscope/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using bannerscope::dom::DomTree;
using bannerscope::dom::NodeId;

constexpr const char* kTimestamp = "2024-01-01T00:00:00Z";
constexpr const char* kBannerMark = "banner-root";

enum class Lang { De, En };
enum class Placement { FixedBottom, FixedTop, Modal, Sticky, Absolute, StaticTop, StaticBottom };
enum class StyleMode { Inline, Block, Linked };
enum class Scheme { Equal, Bright, GrayReject, LinkReject, RejectProminent, Outline, Dark };
enum class ButtonKind { Button, RoleLink, Submit, Onclick, SpanLink };

struct Button {
    std::string label;
    std::string role; // accept, reject, settings, other
    ButtonKind kind = ButtonKind::Button;
};

struct BannerPage {
    std::string slug;
    Lang lang = Lang::De;
    Placement placement = Placement::FixedBottom;
    StyleMode style = StyleMode::Block;
    Scheme scheme = Scheme::Equal;
    int text_variant = 0;
    std::string hint_id;    // id attribute of the banner root, may be empty
    std::string hint_class; // class attribute of the banner root
    bool wrapped = false;   // extra inner container
    std::vector<Button> buttons;
    int site = 0;
    std::string expect; // for the scenario fixtures
};

struct Site {
    const char* name;
    const char* title;
    std::array<const char*, 4> nav;
    std::array<const char*, 3> paragraphs;
    std::array<const char*, 3> footer;
};

const std::array<Site, 4> kSitesDe{{
    {"Stadtkurier", "Neuer Radweg am Flussufer eröffnet",
     {"Lokales", "Sport", "Kultur", "Wetter"},
     {"Nach zwei Jahren Bauzeit ist der neue Radweg entlang des Flussufers am Samstag offiziell eröffnet worden. "
      "Zahlreiche Familien nutzten das sonnige Wetter für eine erste Fahrt.",
      "Die Strecke verbindet die Altstadt mit dem Naherholungsgebiet im Norden und ist durchgehend beleuchtet. "
      "Im Sommer sollen weitere Rastplätze folgen.",
      "Der Bürgermeister dankte allen Beteiligten und kündigte an, das Netz in den kommenden Jahren weiter "
      "auszubauen."},
     {"Impressum", "Datenschutz", "Kontakt"}},
    {"Gartenwelt", "Tomaten richtig pflanzen",
     {"Gemüse", "Blumen", "Werkzeug", "Ratgeber"},
     {"Tomaten brauchen einen warmen, sonnigen Platz und gleichmäßige Feuchtigkeit. Wer sie nach den "
      "Eisheiligen auspflanzt, ist auf der sicheren Seite.",
      "Ein Regenschutz verhindert Braunfäule, und regelmäßiges Ausgeizen sorgt für kräftige Früchte.",
      "Im Spätsommer lohnt es sich, die Pflanzen zu köpfen, damit die letzten Früchte noch reifen."},
     {"Impressum", "Datenschutzerklärung", "AGB"}},
    {"Technikblick", "Das neue Tablet im Test",
     {"Tests", "News", "Ratgeber", "Forum"},
     {"Das Display ist hell und farbtreu, der Akku hält im Alltag gut zwei Tage durch. Die Kamera liefert bei "
      "Tageslicht ordentliche Bilder.",
      "Schwächen zeigt das Gerät bei der Lautsprecherqualität und beim Preis, der deutlich über dem Vorgänger "
      "liegt.",
      "Insgesamt überzeugt das Tablet mit guter Verarbeitung und langer Laufzeit."},
     {"Impressum", "Datenschutz", "Jobs"}},
    {"Reiseportal Nord", "Wandern an der Küste",
     {"Ziele", "Angebote", "Hotels", "Magazin"},
     {"Der Küstenweg führt über steile Klippen und durch kleine Fischerdörfer. Die Etappen sind gut markiert und "
      "auch für Einsteiger geeignet.",
      "Unterkünfte gibt es in jedem größeren Ort, in der Hauptsaison empfiehlt sich aber eine frühe Buchung.",
      "Die beste Reisezeit liegt zwischen Mai und September."},
     {"Impressum", "Datenschutz", "Hilfe"}},
}};

const std::array<Site, 4> kSitesEn{{
    {"Daily Harbour", "City council approves new library",
     {"News", "Sport", "Culture", "Weather"},
     {"The city council voted on Tuesday to fund a new public library in the harbour district. Construction is "
      "expected to begin next spring.",
      "The building will include a reading garden, study rooms and a makerspace for local schools.",
      "Residents welcomed the decision after years of campaigning for more public space."},
     {"Imprint", "Privacy Policy", "Contact"}},
    {"Trail Gear Co", "Choosing your first hiking boots",
     {"Shop", "Guides", "Sale", "Support"},
     {"A good pair of boots should fit snugly around the heel while leaving room for your toes. Try them on in "
      "the afternoon, when your feet are slightly larger.",
      "Waterproof membranes keep you dry but breathe less, so pick them for wet climates.",
      "Break new boots in on short walks before a long trip."},
     {"Terms", "Privacy", "Returns"}},
    {"Code Notes", "Understanding hash maps",
     {"Articles", "Tutorials", "About", "Archive"},
     {"A hash map stores key-value pairs in buckets chosen by a hash function. Lookups take constant time on "
      "average.",
      "Collisions are resolved by chaining or open addressing, each with different memory trade-offs.",
      "Resizing keeps the load factor low at the cost of an occasional full rehash."},
     {"About", "Privacy Policy", "RSS"}},
    {"Weekend Kitchen", "A simple tomato soup",
     {"Recipes", "Seasonal", "Videos", "Shop"},
     {"Roast the tomatoes with garlic and onion until soft, then blend with stock and a splash of cream.",
      "Season with salt, pepper and a little sugar to balance the acidity.",
      "Serve with toasted bread and fresh basil."},
     {"Imprint", "Privacy", "Newsletter"}},
}};

const std::array<const char*, 4> kBannerTextDe{
    "Wir verwenden Cookies und ähnliche Technologien, um Inhalte zu personalisieren und die Zugriffe auf unsere "
    "Website zu analysieren. Mit einem Klick auf „Alle akzeptieren“ stimmen Sie der Verarbeitung zu. Weitere "
    "Informationen finden Sie in unseren Hinweisen zum Datenschutz.",
    "Diese Website nutzt Cookies. Einige sind technisch notwendig, andere helfen uns, das Angebot zu verbessern. "
    "Ihre Einwilligung können Sie jederzeit widerrufen.",
    "Wir und unsere Drittanbieter setzen Cookies und Tracking-Technologien ein. Details zum Datenschutz und zu "
    "Ihren Rechten nach der DSGVO finden Sie in den Einstellungen.",
    "Mit Ihrer Einwilligung verwenden wir Cookies, um Ihnen ein optimales Nutzererlebnis zu bieten und unsere "
    "Reichweite zu messen.",
};

const std::array<const char*, 4> kBannerTextEn{
    "We use cookies and similar technologies to personalise content and analyse our traffic. By clicking "
    "“Accept all” you consent to this. See our privacy notice for details.",
    "This website uses cookies. Some are essential, others help us improve your experience. You can withdraw "
    "your consent at any time.",
    "We and our third party partners use cookies and tracking technologies. Learn how we handle your data under "
    "the GDPR in the settings.",
    "With your consent, we use cookies to give you the best possible experience and to measure our reach.",
};

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Palette {
    std::string banner_bg, banner_fg;
    std::string accept_bg, accept_fg, reject_bg, reject_fg, settings_bg, settings_fg;
    std::string accept_extra, reject_extra; // extra declarations
};

Palette palette(Scheme s) {
    switch (s) {
    case Scheme::Equal:
        return {"#ffffff", "#222222", "#1a73e8", "#ffffff", "#1a73e8", "#ffffff", "#1a73e8", "#ffffff", "", ""};
    case Scheme::Bright:
        // Bright accept, reject in a shade barely off the banner background.
        return {"#052962", "#ffffff", "#ffe500", "#052962", "#0a3778", "#ffffff", "#0a3778", "#ffffff", "", ""};
    case Scheme::GrayReject:
        return {"#ffffff", "#333333", "#2e7d32", "#ffffff", "#f1f1f1", "#777777", "#f1f1f1", "#777777",
                "font-weight:bold", ""};
    case Scheme::LinkReject:
        return {"#f7f7f7", "#222222", "#d35400", "#ffffff", "transparent", "#666666", "transparent", "#666666",
                "font-size:18px", "font-size:13px"};
    case Scheme::RejectProminent:
        return {"#ffffff", "#222222", "transparent", "#555555", "#c62828", "#ffffff", "transparent", "#555555",
                "", ""};
    case Scheme::Outline:
        return {"#fafafa", "#111111", "#ffffff", "#111111", "#ffffff", "#111111", "#ffffff", "#111111",
                "border:1px solid #111111", "border:1px solid #111111"};
    case Scheme::Dark:
        return {"#1e1e1e", "#eeeeee", "#4caf50", "#ffffff", "#424242", "#eeeeee", "#424242", "#eeeeee", "", ""};
    }
    return {};
}

std::string placement_css(Placement p) {
    switch (p) {
    case Placement::FixedBottom: return "position:fixed;bottom:0;left:0;right:0;z-index:9999";
    case Placement::FixedTop: return "position:fixed;top:0;left:0;right:0;z-index:1000";
    case Placement::Modal: return "position:fixed;top:20%;left:25%;width:50%;z-index:10000";
    case Placement::Sticky: return "position:sticky;top:0;z-index:50";
    case Placement::Absolute: return "position:absolute;top:80px;right:20px;width:360px;z-index:5";
    case Placement::StaticTop:
    case Placement::StaticBottom: return "margin:0 0 16px 0";
    }
    return {};
}

/// Builds the banner markup and the CSS that styles it; `inline_css`
/// decides whether declarations go into style attributes.
struct BannerMarkup {
    std::string html;
    std::string css;
};

std::string button_markup(const Button& b, const std::string& cls, const std::string& style) {
    const std::string cls_attr = " class=\"" + cls + "\"";
    const std::string style_attr = style.empty() ? "" : " style=\"" + style + "\"";
    const std::string label = escape(b.label);
    switch (b.kind) {
    case ButtonKind::Button: return "<button type=\"button\"" + cls_attr + style_attr + ">" + label + "</button>";
    case ButtonKind::RoleLink:
        return "<a href=\"#\" role=\"button\"" + cls_attr + style_attr + ">" + label + "</a>";
    case ButtonKind::Submit: return "<input type=\"submit\"" + cls_attr + style_attr + " value=\"" + label + "\">";
    case ButtonKind::Onclick:
        return "<div onclick=\"consent('" + b.role + "')\"" + cls_attr + style_attr + ">" + label + "</div>";
    case ButtonKind::SpanLink: {
        const auto space = b.label.find(' ');
        const std::string inner = space == std::string::npos
                                      ? "<span>" + label + "</span>"
                                      : "<span>" + escape(b.label.substr(0, space)) + "</span> <span>" +
                                            escape(b.label.substr(space + 1)) + "</span>";
        return "<a href=\"#\"" + cls_attr + style_attr + ">" + inner + "</a>";
    }
    }
    return {};
}

BannerMarkup banner_markup(const BannerPage& p) {
    const Palette pal = palette(p.scheme);
    const bool inl = p.style == StyleMode::Inline;
    const std::string root_css = placement_css(p.placement) + ";background-color:" + pal.banner_bg +
                                 ";color:" + pal.banner_fg + ";padding:16px;font-size:14px";
    const auto button_css = [&](const std::string& role) {
        std::string bg = pal.settings_bg, fg = pal.settings_fg, extra;
        if (role == "accept") bg = pal.accept_bg, fg = pal.accept_fg, extra = pal.accept_extra;
        if (role == "reject") bg = pal.reject_bg, fg = pal.reject_fg, extra = pal.reject_extra;
        if (role == "other") bg = "transparent", fg = pal.banner_fg;
        std::string css = "background-color:" + bg + ";color:" + fg + ";padding:8px 14px;margin-right:8px";
        if (!extra.empty()) css += ";" + extra;
        return css;
    };

    BannerMarkup m;
    const std::string text = p.lang == Lang::De ? kBannerTextDe[static_cast<std::size_t>(p.text_variant) % 4]
                                                : kBannerTextEn[static_cast<std::size_t>(p.text_variant) % 4];
    const std::string heading =
        p.lang == Lang::De ? (p.text_variant % 2 ? "Cookie-Hinweis" : "Ihre Privatsphäre ist uns wichtig")
                           : (p.text_variant % 2 ? "Cookie notice" : "We value your privacy");

    std::string buttons;
    for (const auto& b : p.buttons) {
        const std::string cls = "btn btn-" + b.role;
        buttons += button_markup(b, cls, inl ? button_css(b.role) : "") + "\n";
    }
    std::string attrs;
    if (!p.hint_id.empty()) attrs += " id=\"" + p.hint_id + "\"";
    attrs += " class=\"" + (p.hint_class.empty() ? std::string("box") : p.hint_class) + "\"";
    if (inl) attrs += " style=\"" + root_css + "\"";

    std::string body = "<h2>" + escape(heading) + "</h2>\n<p>" + escape(text) + "</p>\n<div class=\"actions\">\n" +
                       buttons + "</div>\n";
    if (p.wrapped) body = "<div class=\"inner\">\n" + body + "</div>\n";
    m.html = "<!--" + std::string(kBannerMark) + "-->\n<div" + attrs + ">\n" + body + "</div>\n";
    if (p.placement == Placement::Modal) {
        m.html = "<div class=\"backdrop\"" +
                 std::string(inl ? " style=\"position:fixed;top:0;left:0;right:0;bottom:0;"
                                   "background-color:rgba(0,0,0,0.5);z-index:9998\""
                                 : "") +
                 ">\n" + m.html + "</div>\n";
    }

    if (!inl) {
        const std::string sel = !p.hint_id.empty() ? "#" + p.hint_id
                                : !p.hint_class.empty() ? "." + p.hint_class.substr(0, p.hint_class.find(' '))
                                                        : ".box";
        m.css += sel + " { " + root_css + "; }\n";
        m.css += sel + " h2 { font-size: 18px; margin: 0 0 8px 0; }\n";
        for (const char* role : {"accept", "reject", "settings", "other"}) {
            m.css += sel + " .btn-" + role + " { " + button_css(role) + "; }\n";
        }
        if (p.placement == Placement::Modal) {
            m.css += ".backdrop { position: fixed; top: 0; left: 0; right: 0; bottom: 0; "
                     "background-color: rgba(0, 0, 0, 0.5); z-index: 9998; }\n";
        }
    }
    return m;
}

const Site& site_of(Lang lang, int index) {
    return lang == Lang::De ? kSitesDe[static_cast<std::size_t>(index) % 4]
                            : kSitesEn[static_cast<std::size_t>(index) % 4];
}

std::string site_css() {
    return "body { font-family: sans-serif; color: #222222; background-color: #ffffff; margin: 0; }\n"
           ".site-header { background-color: #eeeeee; padding: 12px; }\n"
           ".site-header a { color: #0050a0; margin-right: 12px; }\n"
           "footer { background-color: #333333; color: #ffffff; padding: 12px; }\n"
           "footer a { color: #ffffff; }\n";
}

std::string chrome_header(const Site& s) {
    std::string h = "<header class=\"site-header\"><a href=\"/\" class=\"logo\">" + escape(s.name) + "</a>\n<nav>";
    for (const char* n : s.nav) h += "<a href=\"/" + std::string(n) + "\">" + escape(n) + "</a> ";
    return h + "</nav></header>\n";
}

std::string chrome_main(const Site& s, Lang lang) {
    std::string m = "<main><article><h1>" + escape(s.title) + "</h1>\n";
    for (const char* para : s.paragraphs) m += "<p>" + escape(para) + "</p>\n";
    m += std::string("<a class=\"more\" href=\"/archiv\">") + (lang == Lang::De ? "Weiterlesen" : "Read more") +
         "</a>\n</article></main>\n";
    return m;
}

std::string chrome_footer(const Site& s) {
    std::string f = "<footer><p>© 2024 " + escape(s.name) + "</p>\n";
    for (const char* n : s.footer) f += "<a href=\"/" + std::string(n) + "\">" + escape(n) + "</a> ";
    return f + "</footer>\n";
}

struct Page {
    std::string url;
    std::string html;
    std::vector<std::optional<std::string>> sheets;
    bool has_banner = false;
    Lang lang = Lang::De;
    std::string expect;
};

Page render_banner_page(const BannerPage& p, std::size_t index) {
    const Site& site = site_of(p.lang, p.site);
    const BannerMarkup banner = banner_markup(p);
    Page page;
    page.url = std::string("https://") + (p.lang == Lang::De ? "fixture.example.de/" : "fixture.example.com/") +
               std::to_string(index) + "-" + p.slug;
    page.has_banner = true;
    page.lang = p.lang;
    page.expect = p.expect;

    std::string head = "<meta charset=\"utf-8\"><title>" + escape(site.name) + " - " + escape(site.title) +
                       "</title>\n";
    switch (p.style) {
    case StyleMode::Inline:
        head += "<style>\n" + site_css() + "</style>\n";
        break;
    case StyleMode::Block:
        head += "<style>\n" + site_css() + banner.css + "</style>\n";
        break;
    case StyleMode::Linked:
        head += "<link rel=\"stylesheet\" href=\"/assets/site.css\">\n<link rel=\"stylesheet\" "
                "href=\"/assets/consent.css\">\n";
        page.sheets.emplace_back(site_css());
        page.sheets.emplace_back(banner.css);
        break;
    }

    std::string body = chrome_header(site) + chrome_main(site, p.lang) + chrome_footer(site);
    const bool top = p.placement == Placement::StaticTop || p.placement == Placement::FixedTop ||
                     p.placement == Placement::Sticky || index % 3 == 0;
    body = top ? banner.html + body : body + banner.html;
    body += "<script>function consent(kind) { document.cookie = 'consent=' + kind; }</script>\n";
    page.html = std::string("<!DOCTYPE html>\n<html lang=\"") + (p.lang == Lang::De ? "de" : "en") + "\">\n<head>\n" +
                head + "</head>\n<body>\n" + body + "</body>\n</html>\n";
    return page;
}

std::vector<Button> buttons_for(Lang lang, int variant, ButtonKind kind, bool with_reject, bool with_settings) {
    static const std::array<const char*, 6> accept_de{"Alle akzeptieren", "Akzeptieren", "Zustimmen",
                                                      "Einverstanden", "Alle Cookies akzeptieren", "OK"};
    static const std::array<const char*, 6> reject_de{"Ablehnen", "Alle ablehnen", "Nur notwendige Cookies",
                                                      "Nur essenzielle Cookies", "Alle ablehnen", "Ablehnen"};
    static const std::array<const char*, 4> settings_de{"Einstellungen", "Cookie-Einstellungen", "Anpassen",
                                                        "Mehr Optionen"};
    static const std::array<const char*, 6> accept_en{"Accept all", "Accept", "I agree", "Got it",
                                                      "Allow all cookies", "Accept cookies"};
    static const std::array<const char*, 6> reject_en{"Reject all", "Decline", "Only necessary", "Reject",
                                                      "Necessary only", "Reject all"};
    static const std::array<const char*, 4> settings_en{"Manage options", "Cookie settings", "Customize",
                                                        "Preferences"};
    const auto v = static_cast<std::size_t>(variant);
    std::vector<Button> b;
    b.push_back({lang == Lang::De ? accept_de[v % 6] : accept_en[v % 6], "accept", kind});
    if (with_reject) b.push_back({lang == Lang::De ? reject_de[v % 6] : reject_en[v % 6], "reject", kind});
    if (with_settings) b.push_back({lang == Lang::De ? settings_de[v % 4] : settings_en[v % 4], "settings", kind});
    return b;
}

std::vector<BannerPage> banner_pages() {
    std::vector<BannerPage> pages;
    constexpr std::array<Placement, 7> placements{Placement::FixedBottom, Placement::Modal,   Placement::FixedTop,
                                                  Placement::Sticky,      Placement::Absolute, Placement::StaticTop,
                                                  Placement::StaticBottom};
    constexpr std::array<StyleMode, 3> styles{StyleMode::Block, StyleMode::Inline, StyleMode::Linked};
    constexpr std::array<Scheme, 5> schemes{Scheme::Equal, Scheme::GrayReject, Scheme::LinkReject, Scheme::Dark,
                                            Scheme::Outline};
    constexpr std::array<ButtonKind, 5> kinds{ButtonKind::Button, ButtonKind::RoleLink, ButtonKind::Submit,
                                              ButtonKind::Onclick, ButtonKind::SpanLink};
    const std::array<std::pair<const char*, const char*>, 6> hints{{{"cookie-banner", ""},
                                                                    {"", "cmp-container"},
                                                                    {"", "box"},
                                                                    {"consent-layer", "layer"},
                                                                    {"", "notice-bar"},
                                                                    {"", "overlay-panel"}}};

    for (int i = 0; i < 27; ++i) {
        BannerPage p;
        p.lang = i % 5 < 3 ? Lang::De : Lang::En;
        p.placement = placements[static_cast<std::size_t>(i) % placements.size()];
        p.style = styles[static_cast<std::size_t>(i) % styles.size()];
        p.scheme = schemes[static_cast<std::size_t>(i / 2) % schemes.size()];
        p.text_variant = i % 4;
        p.hint_id = hints[static_cast<std::size_t>(i) % hints.size()].first;
        p.hint_class = hints[static_cast<std::size_t>(i) % hints.size()].second;
        p.wrapped = i % 4 == 1;
        p.site = i / 3;
        const bool reject = i % 6 != 4; // every sixth banner hides reject behind the settings
        const bool settings = i % 3 != 2 || !reject;
        p.buttons = buttons_for(p.lang, i, kinds[static_cast<std::size_t>(i) % kinds.size()], reject, settings);
        if (i % 7 == 3) {
            p.buttons.push_back({p.lang == Lang::De ? "Datenschutzerklärung" : "Privacy policy", "other",
                                 ButtonKind::RoleLink});
        }
        p.slug = "banner-" + std::to_string(i);
        pages.push_back(std::move(p));
    }

    // Scenario fixtures for the dissimilarity rules.
    BannerPage bright;
    bright.slug = "bright-accept";
    bright.lang = Lang::En;
    bright.placement = Placement::FixedBottom;
    bright.style = StyleMode::Block;
    bright.scheme = Scheme::Bright;
    bright.text_variant = 0;
    bright.hint_id = "cmp-root";
    bright.buttons = {{"Yes, I'm happy", "accept", ButtonKind::Button}, {"Reject all", "reject", ButtonKind::Button}};
    bright.site = 0;
    bright.expect = "aesthetic_warning";
    pages.push_back(bright);

    BannerPage equal;
    equal.slug = "equal-buttons";
    equal.lang = Lang::De;
    equal.placement = Placement::Modal;
    equal.style = StyleMode::Linked;
    equal.scheme = Scheme::Equal;
    equal.text_variant = 1;
    equal.hint_class = "cookie-dialog";
    equal.buttons = {{"Alle akzeptieren", "accept", ButtonKind::Button}, {"Alle ablehnen", "reject", ButtonKind::Button}};
    equal.site = 1;
    equal.expect = "no_findings";
    pages.push_back(equal);

    BannerPage reverse;
    reverse.slug = "reject-prominent";
    reverse.lang = Lang::De;
    reverse.placement = Placement::FixedBottom;
    reverse.style = StyleMode::Inline;
    reverse.scheme = Scheme::RejectProminent;
    reverse.text_variant = 3;
    reverse.hint_id = "privacy-banner";
    reverse.buttons = {{"Akzeptieren", "accept", ButtonKind::Button}, {"Ablehnen", "reject", ButtonKind::Button}};
    reverse.site = 2;
    reverse.expect = "no_warnings";
    pages.push_back(reverse);
    return pages;
}

Page negative_page(int i) {
    Page page;
    page.lang = i % 2 == 0 ? Lang::De : Lang::En;
    page.url = std::string("https://") + (page.lang == Lang::De ? "plain.example.de/" : "plain.example.com/") +
               "page-" + std::to_string(i);
    const Site& site = site_of(page.lang, i / 2);
    std::string extra;
    std::string head_css = site_css();
    switch (i) {
    case 2: // fixed newsletter box
        extra = "<div class=\"newsletter\" style=\"position:fixed;bottom:0;right:0;z-index:500;"
                "background-color:#ffffff\"><p>Verpassen Sie keine Neuigkeiten mehr und abonnieren Sie unseren "
                "wöchentlichen Newsletter.</p><button>Abonnieren</button><button>Nein danke</button></div>\n";
        break;
    case 3: // recipe page that talks about cookies, the baked kind
        extra = "<section class=\"recipe\"><h2>Chocolate chip cookies</h2><p>These cookies are crisp at the edges "
                "and chewy in the middle. Chill the dough for an hour before baking.</p><button>Print recipe"
                "</button><button>Save</button></section>\n";
        break;
    case 4: // news text about data protection law
        extra = "<section class=\"news\"><h2>Neues Urteil</h2><p>Das Gericht stärkt den Datenschutz von "
                "Beschäftigten und verweist auf die DSGVO.</p><a href=\"/urteil\">Zum Urteil</a> <a "
                "href=\"/kommentar\">Kommentar</a></section>\n";
        break;
    case 5: // documentation page full of links
        extra = "<aside class=\"toc\"><a href=\"#a\">Introduction</a> <a href=\"#b\">Installation</a> <a "
                "href=\"#c\">Configuration</a> <a href=\"#d\">FAQ</a></aside>\n";
        break;
    case 6: // chat widget
        extra = "<div class=\"chat\" style=\"position:fixed;bottom:20px;right:20px;z-index:999\"><p>Haben Sie "
                "Fragen? Unser Team hilft Ihnen gerne weiter.</p><button>Chat starten</button></div>\n";
        break;
    case 7: // newsletter modal
        extra = "<div class=\"modal\" style=\"position:fixed;top:30%;left:30%;z-index:2000\"><p>Subscribe to our "
                "newsletter and get ten percent off your next order.</p><button>Subscribe</button><a "
                "href=\"#\" role=\"button\">No thanks</a></div>\n";
        break;
    case 9: // search form
        extra = "<form action=\"/search\"><p>Search the archive of articles and tutorials.</p><input type=\"text\" "
                "name=\"q\"><input type=\"submit\" value=\"Search\"></form>\n";
        break;
    default: break;
    }
    page.html = std::string("<!DOCTYPE html>\n<html lang=\"") + (page.lang == Lang::De ? "de" : "en") +
                "\">\n<head>\n<meta charset=\"utf-8\"><title>" + escape(site.name) + "</title>\n<style>\n" +
                head_css + "</style>\n</head>\n<body>\n" + chrome_header(site) + chrome_main(site, page.lang) +
                extra + chrome_footer(site) + "</body>\n</html>\n";
    return page;
}

/// The element right after the marker comment.
std::optional<NodeId> marked_root(const DomTree& tree) {
    for (std::uint32_t i = 0; i < tree.size(); ++i) {
        const auto& n = tree[NodeId{i}];
        if (n.kind != bannerscope::dom::NodeKind::Comment || n.text != kBannerMark) continue;
        const auto& siblings = tree[*n.parent].children;
        const auto it = std::find(siblings.begin(), siblings.end(), NodeId{i});
        for (auto s = it + 1; s != siblings.end(); ++s) {
            if (tree[*s].is_element()) return *s;
        }
    }
    return std::nullopt;
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: make_fixture_corpus <corpus_dir> <truth_json>\n";
        return 1;
    }
    namespace fs = std::filesystem;
    const fs::path dir = argv[1];
    try {
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::vector<Page> pages;
        const auto specs = banner_pages();
        for (std::size_t i = 0; i < specs.size(); ++i) pages.push_back(render_banner_page(specs[i], i));
        for (int i = 0; i < 10; ++i) pages.push_back(negative_page(i));

        bannerscope::corpus::CorpusManifest manifest;
        nlohmann::ordered_json truth = nlohmann::ordered_json::array();
        for (const auto& page : pages) {
            auto entry = bannerscope::corpus::store_entry(dir, page.url, 200, page.html, page.sheets, kTimestamp);
            nlohmann::ordered_json t;
            t["id"] = entry.id;
            t["url"] = page.url;
            t["lang"] = page.lang == Lang::De ? "de" : "en";
            t["has_banner"] = page.has_banner;
            if (page.has_banner) {
                const auto tree = bannerscope::dom::parse_html(page.html);
                const auto root = marked_root(tree);
                if (!root) throw std::runtime_error("banner marker missing in " + page.url);
                t["banner_path"] = bannerscope::dom::node_path(tree, *root);
            } else {
                t["banner_path"] = nullptr;
            }
            if (!page.expect.empty()) t["expect"] = page.expect;
            truth.push_back(std::move(t));
            manifest.entries.push_back(std::move(entry));
        }
        bannerscope::corpus::write_manifest(dir, manifest);
        bannerscope::io::write_file_atomic(argv[2], truth.dump(2) + "\n");
        std::cout << "wrote " << pages.size() << " pages to " << dir.string() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
