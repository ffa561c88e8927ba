#include "stancebias/tokenize.hpp"

#include <cctype>
#include <cstdint>

namespace stancebias {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }
bool is_alpha(unsigned char c) { return std::isalpha(c) != 0; }
bool is_alnum(unsigned char c) { return std::isalnum(c) != 0; }

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
    }
    return true;
}

// Decode one UTF-8 codepoint starting at i; advances i. Invalid bytes are
// consumed one at a time and returned as-is.
std::uint32_t next_codepoint(std::string_view s, std::size_t& i) {
    auto b0 = static_cast<unsigned char>(s[i]);
    int len = 1;
    std::uint32_t cp = b0;
    if ((b0 & 0x80U) == 0) {
        len = 1;
    } else if ((b0 & 0xE0U) == 0xC0U) {
        len = 2;
        cp = b0 & 0x1FU;
    } else if ((b0 & 0xF0U) == 0xE0U) {
        len = 3;
        cp = b0 & 0x0FU;
    } else if ((b0 & 0xF8U) == 0xF0U) {
        len = 4;
        cp = b0 & 0x07U;
    } else {
        ++i;
        return b0;
    }
    if (i + static_cast<std::size_t>(len) > s.size()) {
        ++i;
        return b0;
    }
    for (int k = 1; k < len; ++k) {
        auto bk = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
        if ((bk & 0xC0U) != 0x80U) {
            ++i;
            return b0;
        }
        cp = (cp << 6) | (bk & 0x3FU);
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

// Latin-1 supplement and a few Latin Extended-A letters, folded to ASCII.
char fold_codepoint(std::uint32_t cp) {
    if (cp < 0x80) {
        auto c = static_cast<unsigned char>(cp);
        if (is_alnum(c)) return static_cast<char>(std::tolower(c));
        if (cp == '\'') return '\'';
        return 0;
    }
    switch (cp) {
        case 0xC0: case 0xC1: case 0xC2: case 0xC3: case 0xC4: case 0xC5:
        case 0xE0: case 0xE1: case 0xE2: case 0xE3: case 0xE4: case 0xE5:
        case 0x100: case 0x101: case 0x102: case 0x103:
            return 'a';
        case 0xC7: case 0xE7: case 0x106: case 0x107:
            return 'c';
        case 0xC8: case 0xC9: case 0xCA: case 0xCB:
        case 0xE8: case 0xE9: case 0xEA: case 0xEB:
        case 0x112: case 0x113:
            return 'e';
        case 0xCC: case 0xCD: case 0xCE: case 0xCF:
        case 0xEC: case 0xED: case 0xEE: case 0xEF:
        case 0x128: case 0x129: case 0x12A: case 0x12B:
            return 'i';
        case 0xD1: case 0xF1:
            return 'n';
        case 0xD2: case 0xD3: case 0xD4: case 0xD5: case 0xD6: case 0xD8:
        case 0xF2: case 0xF3: case 0xF4: case 0xF5: case 0xF6: case 0xF8:
            return 'o';
        case 0xD9: case 0xDA: case 0xDB: case 0xDC:
        case 0xF9: case 0xFA: case 0xFB: case 0xFC:
            return 'u';
        case 0xDD: case 0xFD: case 0xFF:
            return 'y';
        default:
            return 0;
    }
}

} // namespace

bool is_url_token(std::string_view raw) {
    return starts_with_ci(raw, "http://") || starts_with_ci(raw, "https://") ||
           starts_with_ci(raw, "www.");
}

std::string clean_token(std::string_view raw) {
    if (is_url_token(raw)) return {};
    std::size_t begin = 0;
    while (begin < raw.size() && (raw[begin] == '#' || raw[begin] == '@')) ++begin;
    std::string_view t = raw.substr(begin);
    while (!t.empty() && !is_alnum(static_cast<unsigned char>(t.front())) &&
           static_cast<unsigned char>(t.front()) < 0x80) {
        t.remove_prefix(1);
    }
    while (!t.empty() && !is_alnum(static_cast<unsigned char>(t.back())) &&
           static_cast<unsigned char>(t.back()) < 0x80) {
        t.remove_suffix(1);
    }
    bool has_alpha = false;
    for (std::size_t i = 0; i < t.size();) {
        std::uint32_t cp = next_codepoint(t, i);
        if (cp < 0x80 ? is_alpha(static_cast<unsigned char>(cp)) : fold_codepoint(cp) != 0) {
            has_alpha = true;
            break;
        }
    }
    if (!has_alpha) return {};
    return std::string(t);
}

std::vector<std::string> word_tokens(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) {
            std::string t = clean_token(text.substr(start, i - start));
            if (!t.empty()) out.push_back(std::move(t));
        }
    }
    return out;
}

std::string lowercase_ascii(std::string_view text) {
    std::string out(text);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string ascii_fold_lower(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        std::uint32_t cp = next_codepoint(text, i);
        char c = fold_codepoint(cp);
        if (c != 0) out.push_back(c);
    }
    return out;
}

} // namespace stancebias
