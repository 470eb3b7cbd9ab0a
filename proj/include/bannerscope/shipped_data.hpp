#pragma once

#include <string_view>

// Contents of data/lexicon.txt and data/seed_phrases.txt, compiled in.
namespace bannerscope::shipped {

std::string_view lexicon_text();
std::string_view seed_phrases_text();

} // namespace bannerscope::shipped
