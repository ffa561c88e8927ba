#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace stancebias {

// Reading-ease bands; higher scores are easier. Figure-style aliases map
// Low->Easy, High->Difficult, VeryHigh->VeryDifficult.
enum class ReadabilityClass { Easy, Medium, Difficult, VeryDifficult };

struct ReadabilityAnnotation {
    int words = 0;      // W
    int sentences = 0;  // Se
    int syllables = 0;  // Sy
    double score = 0.0;
    ReadabilityClass cls = ReadabilityClass::Easy;
};

// Rule-based syllable count: number of maximal vowel groups (a,e,i,o,u,y)
// after ASCII folding, minus one for a terminal consonant+e where the
// consonant is not 'l', floored at 1. Throws TokenError if the token has no
// alphabetic character.
int count_syllables(std::string_view word);

// 206.835 - 1.015*W/Se - 84.6*Sy/W, unclamped.
double flesch_from_counts(int words, int sentences, int syllables);

// Tokenizes, counts words/sentences/syllables and scores the text. A
// sentence is a terminal-punctuation (.!?) segment containing at least one
// word; trailing text after the last terminator counts as one sentence, so
// unpunctuated posts still get Se = 1. Throws InputError when the text has
// no word tokens.
ReadabilityAnnotation flesch_score(std::string_view text);

// Throws InputError for non-finite scores.
ReadabilityClass readability_class(double score);

std::string to_string(ReadabilityClass c);
std::optional<ReadabilityClass> readability_class_from_string(std::string_view name);

} // namespace stancebias
