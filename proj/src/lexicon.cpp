#include "bannerscope/banner.hpp"
#include "bannerscope/error.hpp"
#include "bannerscope/shipped_data.hpp"
#include "bannerscope/text_util.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bannerscope::banner {

namespace {

void add_unique(std::vector<std::string>& list, std::string entry) {
    if (std::find(list.begin(), list.end(), entry) == list.end()) list.push_back(std::move(entry));
}

} // namespace

std::string_view to_string(Language lang) { return lang == Language::De ? "de" : "en"; }

KeywordLexicon parse_lexicon(std::string_view text) {
    KeywordLexicon lexicon;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string trimmed = text::collapse_whitespace(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        const auto colon = trimmed.find(':');
        if (colon == std::string::npos) throw FormatError(line_no, "expected '<lang>:<keyword>' or 'attr:<token>'");
        const std::string prefix = text::to_lower(text::collapse_whitespace(trimmed.substr(0, colon)));
        std::string entry = text::to_lower(text::collapse_whitespace(trimmed.substr(colon + 1)));
        if (entry.empty()) throw FormatError(line_no, "empty entry");
        if (prefix == "de") add_unique(lexicon.de, std::move(entry));
        else if (prefix == "en") add_unique(lexicon.en, std::move(entry));
        else if (prefix == "attr") add_unique(lexicon.attribute_hints, std::move(entry));
        else throw FormatError(line_no, "unknown prefix '" + prefix + "'");
    }
    return lexicon;
}

KeywordLexicon load_lexicon(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open lexicon " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read lexicon " + path.string());
    return parse_lexicon(buf.str());
}

const KeywordLexicon& default_lexicon() {
    static const KeywordLexicon lexicon = parse_lexicon(shipped::lexicon_text());
    return lexicon;
}

} // namespace bannerscope::banner
