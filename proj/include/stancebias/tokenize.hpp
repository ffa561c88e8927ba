#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stancebias {

// Shared tokenizer for the readability and dialect annotators so both see
// the same word stream: whitespace split, URL tokens dropped, leading #/@
// sigils stripped, surrounding punctuation trimmed. A token survives only
// if it still contains an alphabetic character.
std::vector<std::string> word_tokens(std::string_view text);

bool is_url_token(std::string_view raw);

// Trimmed/de-sigiled form of one raw token; empty string if it is a URL or
// carries no alphabetic character.
std::string clean_token(std::string_view raw);

std::string lowercase_ascii(std::string_view text);

// Decodes UTF-8 and folds common accented Latin letters to their ASCII base
// letter; other non-ASCII codepoints are dropped. Result is lowercase.
std::string ascii_fold_lower(std::string_view text);

} // namespace stancebias
