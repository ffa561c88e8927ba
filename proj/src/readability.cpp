#include "stancebias/readability.hpp"

#include <cctype>
#include <cmath>

#include "stancebias/errors.hpp"
#include "stancebias/tokenize.hpp"

namespace stancebias {

namespace {

bool is_vowel(char c) {
    switch (c) {
        case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
            return true;
        default:
            return false;
    }
}

bool is_letter(char c) { return c >= 'a' && c <= 'z'; }

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

} // namespace

int count_syllables(std::string_view word) {
    std::string folded = ascii_fold_lower(word);
    bool has_letter = false;
    for (char c : folded) {
        if (is_letter(c)) {
            has_letter = true;
            break;
        }
    }
    if (!has_letter) throw TokenError("token has no alphabetic character: \"" + std::string(word) + "\"");

    int groups = 0;
    bool in_group = false;
    for (char c : folded) {
        if (is_vowel(c)) {
            if (!in_group) ++groups;
            in_group = true;
        } else {
            in_group = false;
        }
    }

    // Terminal consonant+e is usually silent ("the", "make"); a trailing
    // "le" keeps its syllable ("table"). An accented final e is not silent,
    // so the check also looks at the unfolded bytes: the last letter-ish
    // byte must be a plain ASCII e.
    bool plain_final_e = false;
    for (std::size_t i = word.size(); i > 0; --i) {
        auto c = static_cast<unsigned char>(word[i - 1]);
        if (c >= 0x80) break;  // part of a UTF-8 sequence: accented letter
        if (std::isalpha(c) != 0) {
            plain_final_e = c == 'e' || c == 'E';
            break;
        }
    }
    std::size_t n = folded.size();
    if (plain_final_e && n >= 2 && folded[n - 1] == 'e') {
        char prev = folded[n - 2];
        if (is_letter(prev) && !is_vowel(prev) && prev != 'l') --groups;
    }

    return groups < 1 ? 1 : groups;
}

double flesch_from_counts(int words, int sentences, int syllables) {
    double w = words;
    double se = sentences;
    double sy = syllables;
    return 206.835 - 1.015 * (w / se) - 84.6 * (sy / w);
}

ReadabilityAnnotation flesch_score(std::string_view text) {
    std::vector<std::string> words = word_tokens(text);
    if (words.empty()) throw InputError("text contains no word tokens");

    int syllables = 0;
    for (const auto& w : words) syllables += count_syllables(w);

    // Count segments between terminator runs that contain a word.
    int sentences = 0;
    std::size_t seg_start = 0;
    auto close_segment = [&](std::size_t seg_end) {
        if (seg_end > seg_start &&
            !word_tokens(text.substr(seg_start, seg_end - seg_start)).empty()) {
            ++sentences;
        }
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (is_terminator(text[i])) {
            close_segment(i);
            while (i + 1 < text.size() && is_terminator(text[i + 1])) ++i;
            seg_start = i + 1;
        }
    }
    close_segment(text.size());
    if (sentences < 1) sentences = 1;

    ReadabilityAnnotation ann;
    ann.words = static_cast<int>(words.size());
    ann.sentences = sentences;
    ann.syllables = syllables;
    ann.score = flesch_from_counts(ann.words, ann.sentences, ann.syllables);
    ann.cls = readability_class(ann.score);
    return ann;
}

ReadabilityClass readability_class(double score) {
    if (!std::isfinite(score)) throw InputError("readability score is not finite");
    if (score >= 80.0) return ReadabilityClass::Easy;
    if (score >= 60.0) return ReadabilityClass::Medium;
    if (score >= 30.0) return ReadabilityClass::Difficult;
    return ReadabilityClass::VeryDifficult;
}

std::string to_string(ReadabilityClass c) {
    switch (c) {
        case ReadabilityClass::Easy: return "Easy";
        case ReadabilityClass::Medium: return "Medium";
        case ReadabilityClass::Difficult: return "Difficult";
        case ReadabilityClass::VeryDifficult: return "VeryDifficult";
    }
    return "Easy";
}

std::optional<ReadabilityClass> readability_class_from_string(std::string_view name) {
    std::string n = lowercase_ascii(name);
    if (n == "easy" || n == "low") return ReadabilityClass::Easy;
    if (n == "medium") return ReadabilityClass::Medium;
    if (n == "difficult" || n == "high") return ReadabilityClass::Difficult;
    if (n == "verydifficult" || n == "veryhigh" || n == "very difficult" || n == "very high")
        return ReadabilityClass::VeryDifficult;
    return std::nullopt;
}

} // namespace stancebias
