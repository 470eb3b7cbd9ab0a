// Error-tolerant HTML parsing.
//
// Tree construction is a simplified subset of the HTML5 algorithm: end tags
// close the nearest matching open element (or are ignored), and the common
// implied end tags for p, li, dd/dt, td/th, tr and option are honored. There
// is no adoption agency, no foster parenting and no implicit tbody.

#include "bannerscope/dom.hpp"
#include "bannerscope/text_util.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <initializer_list>

namespace bannerscope::dom {

namespace {

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_html_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }
char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

bool one_of(std::string_view tag, std::initializer_list<std::string_view> set) {
    return std::find(set.begin(), set.end(), tag) != set.end();
}

bool closes_paragraph(std::string_view tag) {
    return one_of(tag, {"address", "article", "aside", "blockquote", "center", "details", "dialog", "dir",
                        "div", "dl", "dd", "dt", "fieldset", "figcaption", "figure", "footer", "form", "h1",
                        "h2", "h3", "h4", "h5", "h6", "header", "hgroup", "hr", "li", "main", "menu", "nav",
                        "ol", "p", "pre", "section", "summary", "table", "ul"});
}

bool is_head_element(std::string_view tag) {
    return one_of(tag, {"base", "link", "meta", "script", "style", "title"});
}

/// Escapable raw text: read verbatim up to the end tag, then entity-decoded.
bool is_rcdata_element(std::string_view tag) { return tag == "title" || tag == "textarea"; }

std::string_view named_entity(std::string_view name) {
    if (name == "amp") return "&";
    if (name == "lt") return "<";
    if (name == "gt") return ">";
    if (name == "quot") return "\"";
    if (name == "apos") return "'";
    if (name == "nbsp") return "\xC2\xA0";
    return {};
}

/// Decodes the supported character references; anything else is literal.
std::string decode_entities(std::string_view s) {
    if (s.find('&') == std::string_view::npos) return std::string(s);
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        if (i + 1 < s.size() && s[i + 1] == '#') {
            std::size_t j = i + 2;
            const bool hex = j < s.size() && (s[j] == 'x' || s[j] == 'X');
            if (hex) ++j;
            const std::size_t digits_start = j;
            while (j < s.size() && (hex ? std::isxdigit(static_cast<unsigned char>(s[j]))
                                        : std::isdigit(static_cast<unsigned char>(s[j])))) {
                ++j;
            }
            if (j > digits_start) {
                const std::string digits(s.substr(digits_start, std::min<std::size_t>(j - digits_start, 8)));
                char32_t cp = static_cast<char32_t>(std::strtoul(digits.c_str(), nullptr, hex ? 16 : 10));
                if (j - digits_start > 8 || cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
                    cp = text::kReplacementChar;
                }
                text::append_utf8(out, cp);
                if (j < s.size() && s[j] == ';') ++j;
                i = j;
                continue;
            }
        } else {
            const std::size_t semi = s.find(';', i + 1);
            if (semi != std::string_view::npos && semi - i <= 6) {
                const auto replacement = named_entity(s.substr(i + 1, semi - i - 1));
                if (!replacement.empty()) {
                    out += replacement;
                    i = semi + 1;
                    continue;
                }
            }
        }
        out.push_back(s[i++]);
    }
    return out;
}

bool is_whitespace_only(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return is_html_space(c); });
}

struct StartTag {
    std::string name;
    std::vector<Attribute> attributes;
    bool self_closing = false;
};

class Parser {
public:
    explicit Parser(std::string_view input) : in_(input) {}

    DomTree run() && {
        stack_.push_back(NodeId{0});
        while (pos_ < in_.size()) step();
        ensure_body();
        return std::move(builder_).finish();
    }

private:
    void step() {
        if (in_[pos_] == '<' && pos_ + 1 < in_.size()) {
            const char next = in_[pos_ + 1];
            if (next == '!') return markup_declaration();
            if (next == '?') return bogus_comment(pos_ + 2);
            if (next == '/') return end_tag();
            if (is_ascii_alpha(next)) return start_tag();
        }
        text_run();
    }

    void text_run() {
        std::size_t end = pos_ + 1;
        while (end < in_.size()) {
            if (in_[end] == '<' && end + 1 < in_.size()) {
                const char n = in_[end + 1];
                if (n == '!' || n == '?' || n == '/' || is_ascii_alpha(n)) break;
            }
            ++end;
        }
        insert_text(decode_entities(in_.substr(pos_, end - pos_)));
        pos_ = end;
    }

    void markup_declaration() {
        if (in_.substr(pos_, 4) == "<!--") {
            const std::size_t body = pos_ + 4;
            // "<!-->" and "<!--->" are empty comments.
            if (in_.substr(body, 1) == ">") {
                insert_comment("");
                pos_ = body + 1;
                return;
            }
            if (in_.substr(body, 2) == "->") {
                insert_comment("");
                pos_ = body + 2;
                return;
            }
            const std::size_t close = in_.find("-->", body);
            const std::size_t end = close == std::string_view::npos ? in_.size() : close;
            insert_comment(std::string(in_.substr(body, end - body)));
            pos_ = close == std::string_view::npos ? in_.size() : close + 3;
            return;
        }
        std::string head;
        for (std::size_t i = pos_ + 2; i < in_.size() && head.size() < 7; ++i) head.push_back(ascii_lower(in_[i]));
        if (head == "doctype") {
            const std::size_t close = in_.find('>', pos_);
            pos_ = close == std::string_view::npos ? in_.size() : close + 1;
            return;
        }
        bogus_comment(pos_ + 2);
    }

    void bogus_comment(std::size_t body) {
        const std::size_t close = in_.find('>', body);
        const std::size_t end = close == std::string_view::npos ? in_.size() : close;
        insert_comment(std::string(in_.substr(body, end - body)));
        pos_ = close == std::string_view::npos ? in_.size() : close + 1;
    }

    std::string read_name(std::size_t& i) const {
        std::string name;
        while (i < in_.size() && !is_html_space(in_[i]) && in_[i] != '/' && in_[i] != '>') {
            name.push_back(ascii_lower(in_[i++]));
        }
        return name;
    }

    void skip_spaces(std::size_t& i) const {
        while (i < in_.size() && is_html_space(in_[i])) ++i;
    }

    void end_tag() {
        std::size_t i = pos_ + 2;
        if (i < in_.size() && in_[i] == '>') {
            pos_ = i + 1;
            return;
        }
        if (i >= in_.size() || !is_ascii_alpha(in_[i])) return bogus_comment(i);
        const std::string name = read_name(i);
        const std::size_t close = in_.find('>', i);
        pos_ = close == std::string_view::npos ? in_.size() : close + 1;
        close_element(name);
    }

    void start_tag() {
        std::size_t i = pos_ + 1;
        StartTag tag;
        tag.name = read_name(i);
        while (i < in_.size()) {
            skip_spaces(i);
            if (i >= in_.size()) break;
            if (in_[i] == '>') {
                ++i;
                break;
            }
            if (in_[i] == '/') {
                ++i;
                if (i < in_.size() && in_[i] == '>') {
                    tag.self_closing = true;
                    ++i;
                    break;
                }
                continue;
            }
            std::string name;
            // An attribute name may start with '=' but never contains one later.
            if (in_[i] == '=') name.push_back(in_[i++]);
            while (i < in_.size() && !is_html_space(in_[i]) && in_[i] != '/' && in_[i] != '>' && in_[i] != '=') {
                name.push_back(ascii_lower(in_[i++]));
            }
            std::string value;
            std::size_t j = i;
            skip_spaces(j);
            if (j < in_.size() && in_[j] == '=') {
                i = j + 1;
                skip_spaces(i);
                if (i < in_.size() && (in_[i] == '"' || in_[i] == '\'')) {
                    const char quote = in_[i++];
                    const std::size_t close = in_.find(quote, i);
                    const std::size_t end = close == std::string_view::npos ? in_.size() : close;
                    value = decode_entities(in_.substr(i, end - i));
                    i = close == std::string_view::npos ? in_.size() : close + 1;
                } else {
                    const std::size_t start = i;
                    while (i < in_.size() && !is_html_space(in_[i]) && in_[i] != '>') ++i;
                    value = decode_entities(in_.substr(start, i - start));
                }
            }
            const bool duplicate = std::any_of(tag.attributes.begin(), tag.attributes.end(),
                                               [&](const Attribute& a) { return a.name == name; });
            if (!duplicate && !name.empty()) tag.attributes.push_back({std::move(name), std::move(value)});
        }
        pos_ = i;
        open_element(std::move(tag));
    }

    /// Reads the contents of script/style/title/textarea up to the matching end tag.
    std::string_view read_raw_text(std::string_view name) {
        std::size_t i = pos_;
        while (i < in_.size()) {
            const std::size_t lt = in_.find("</", i);
            if (lt == std::string_view::npos) break;
            std::size_t k = lt + 2;
            bool match = k + name.size() <= in_.size();
            for (std::size_t c = 0; match && c < name.size(); ++c) {
                match = ascii_lower(in_[k + c]) == name[c];
            }
            if (match) {
                k += name.size();
                if (k == in_.size() || is_html_space(in_[k]) || in_[k] == '/' || in_[k] == '>') {
                    const auto content = in_.substr(pos_, lt - pos_);
                    const std::size_t close = in_.find('>', k);
                    pos_ = close == std::string_view::npos ? in_.size() : close + 1;
                    return content;
                }
            }
            i = lt + 2;
        }
        const auto content = in_.substr(pos_);
        pos_ = in_.size();
        return content;
    }

    // Tree construction ---------------------------------------------------

    NodeId current() const { return stack_.back(); }

    void ensure_html() {
        if (html_) return;
        html_ = builder_.add_element(NodeId{0}, "html");
        builder_.set_html(*html_);
        stack_.push_back(*html_);
    }

    void pop_to(NodeId keep) {
        while (stack_.size() > 1 && current() != keep) stack_.pop_back();
    }

    void ensure_body() {
        ensure_html();
        if (body_) return;
        pop_to(*html_);
        body_ = builder_.add_element(*html_, "body");
        builder_.set_body(*body_);
        stack_.push_back(*body_);
    }

    bool head_is_open() const {
        return head_ && std::find(stack_.begin(), stack_.end(), *head_) != stack_.end();
    }

    void insert_text(const std::string& text) {
        if (text.empty()) return;
        if (!body_) {
            const NodeId cur = current();
            const bool structural = cur == NodeId{0} || (html_ && cur == *html_) || (head_ && cur == *head_);
            if (structural) {
                if (is_whitespace_only(text)) return;
                ensure_body();
            }
        }
        builder_.add_text(current(), text);
    }

    void insert_comment(std::string text) { builder_.add_comment(current(), std::move(text)); }

    /// Index in the open-element stack of the nearest `target`, searching
    /// from the top and giving up at any element in `stop`.
    std::optional<std::size_t> find_open(std::initializer_list<std::string_view> targets,
                                         std::initializer_list<std::string_view> stop) const {
        for (std::size_t i = stack_.size(); i-- > 1;) {
            const auto& tag = builder_.node(stack_[i]).tag;
            if (one_of(tag, targets)) return i;
            if (one_of(tag, stop) || one_of(tag, {"html", "body"})) return std::nullopt;
        }
        return std::nullopt;
    }

    void close_at(std::optional<std::size_t> index) {
        if (index) stack_.resize(*index);
    }

    void apply_implied_end_tags(std::string_view tag) {
        if (closes_paragraph(tag)) {
            close_at(find_open({"p"}, {"button", "table", "td", "th", "caption", "object", "marquee", "template"}));
        }
        if (tag == "li") {
            close_at(find_open({"li"}, {"ul", "ol", "table", "td", "th"}));
        } else if (tag == "dd" || tag == "dt") {
            close_at(find_open({"dd", "dt"}, {"dl", "table", "td", "th"}));
        } else if (tag == "td" || tag == "th") {
            close_at(find_open({"td", "th"}, {"tr", "table"}));
        } else if (tag == "tr") {
            close_at(find_open({"tr"}, {"table", "thead", "tbody", "tfoot"}));
        } else if (tag == "thead" || tag == "tbody" || tag == "tfoot") {
            close_at(find_open({"thead", "tbody", "tfoot"}, {"table"}));
        } else if (tag == "option" || tag == "optgroup") {
            if (builder_.node(current()).tag == "option") stack_.pop_back();
            if (tag == "optgroup" && builder_.node(current()).tag == "optgroup") stack_.pop_back();
        }
    }

    void open_element(StartTag tag) {
        const std::string& name = tag.name;
        if (name == "html") {
            if (!html_) {
                html_ = builder_.add_element(NodeId{0}, "html", std::move(tag.attributes));
                builder_.set_html(*html_);
                stack_.push_back(*html_);
            } else {
                builder_.merge_attributes(*html_, tag.attributes);
            }
            return;
        }
        if (name == "head") {
            if (!head_ && !body_) {
                ensure_html();
                pop_to(*html_);
                head_ = builder_.add_element(*html_, "head", std::move(tag.attributes));
                builder_.set_head(*head_);
                stack_.push_back(*head_);
            }
            return;
        }
        if (name == "body") {
            if (!body_) {
                ensure_html();
                pop_to(*html_);
                body_ = builder_.add_element(*html_, "body", std::move(tag.attributes));
                builder_.set_body(*body_);
                stack_.push_back(*body_);
            } else {
                builder_.merge_attributes(*body_, tag.attributes);
            }
            return;
        }

        if (!body_ && is_head_element(name) && (head_is_open() || !head_)) {
            if (!head_) {
                ensure_html();
                pop_to(*html_);
                head_ = builder_.add_element(*html_, "head");
                builder_.set_head(*head_);
                stack_.push_back(*head_);
            }
        } else {
            ensure_body();
            apply_implied_end_tags(name);
        }

        const bool is_void = is_void_element(name);
        const std::string tag_name = name;
        const NodeId id = builder_.add_element(current(), std::move(tag.name), std::move(tag.attributes));
        if (is_void) return;
        if (is_raw_text_element(tag_name) || is_rcdata_element(tag_name)) {
            const auto raw = read_raw_text(tag_name);
            if (!raw.empty()) {
                builder_.add_text(id, is_rcdata_element(tag_name) ? decode_entities(raw) : std::string(raw));
            }
            return;
        }
        if (!tag.self_closing) stack_.push_back(id);
    }

    void close_element(const std::string& name) {
        if (name == "html" || name == "body") return;
        if (name == "head") {
            if (head_is_open()) pop_to(*html_);
            return;
        }
        for (std::size_t i = stack_.size(); i-- > 1;) {
            const NodeId id = stack_[i];
            if ((html_ && id == *html_) || (body_ && id == *body_) || (head_ && id == *head_)) return;
            if (builder_.node(id).tag == name) {
                stack_.resize(i);
                return;
            }
        }
    }

    std::string_view in_;
    std::size_t pos_ = 0;
    DomTree::Builder builder_;
    std::vector<NodeId> stack_;
    std::optional<NodeId> html_;
    std::optional<NodeId> head_;
    std::optional<NodeId> body_;
};

} // namespace

DomTree parse_html(std::string_view input) {
    const std::string clean = text::sanitize_utf8(input);
    return Parser(clean).run();
}

} // namespace bannerscope::dom
