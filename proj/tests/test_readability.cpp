#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "stancebias/errors.hpp"
#include "stancebias/readability.hpp"
#include "stancebias/tokenize.hpp"

using namespace stancebias;

TEST_CASE("count_syllables on dictionary-checked words") {
    CHECK(count_syllables("cat") == 1);
    CHECK(count_syllables("beautiful") == 3);  // beau-ti-ful
    CHECK(count_syllables("the") == 1);        // silent-e floor
    CHECK(count_syllables("make") == 1);
    CHECK(count_syllables("table") == 2);      // trailing "le" keeps its syllable
    CHECK(count_syllables("see") == 1);
    CHECK(count_syllables("readability") == 5);
    CHECK(count_syllables("a") == 1);
    CHECK(count_syllables("rhythm") == 1);
    CHECK(count_syllables("HELLO") == 2);
    CHECK(count_syllables("caf\xc3\xa9") == 2);  // accent folds to e
}

TEST_CASE("count_syllables rejects tokens without letters") {
    CHECK_THROWS_AS(count_syllables("123"), TokenError);
    CHECK_THROWS_AS(count_syllables("!!!"), TokenError);
}

TEST_CASE("flesch_from_counts reproduces the formula") {
    CHECK(flesch_from_counts(100, 5, 150) == doctest::Approx(59.635).epsilon(1e-12));
    CHECK(flesch_from_counts(1, 1, 1) == doctest::Approx(121.22).epsilon(1e-12));
}

TEST_CASE("flesch_score on a one-word sentence") {
    ReadabilityAnnotation ann = flesch_score("Go.");
    CHECK(ann.words == 1);
    CHECK(ann.sentences == 1);
    CHECK(ann.syllables == 1);
    CHECK(ann.score == doctest::Approx(121.22).epsilon(1e-9));
    CHECK(ann.cls == ReadabilityClass::Easy);
}

TEST_CASE("flesch_score errors on texts without words") {
    CHECK_THROWS_AS(flesch_score("!!!"), InputError);
    CHECK_THROWS_AS(flesch_score("   "), InputError);
    CHECK_THROWS_AS(flesch_score("http://example.com"), InputError);
}

TEST_CASE("sentence counting uses terminators plus a trailing fragment") {
    CHECK(flesch_score("One. Two! Three?").sentences == 3);
    CHECK(flesch_score("One. Two! Three? And more").sentences == 4);
    CHECK(flesch_score("no punctuation at all").sentences == 1);
    CHECK(flesch_score("Wow!!! Nice...").sentences == 2);
    // a terminator run with no words in between adds nothing
    CHECK(flesch_score("Hmm. . . done").sentences == 2);
}

TEST_CASE("tweet artifacts: sigils stripped, urls dropped") {
    ReadabilityAnnotation ann = flesch_score("#Vote for @joe https://example.com/x today");
    CHECK(ann.words == 4);  // Vote, for, joe, today
}

TEST_CASE("readability_class boundaries map to the upper band") {
    CHECK(readability_class(80.0) == ReadabilityClass::Easy);
    CHECK(readability_class(60.0) == ReadabilityClass::Medium);
    CHECK(readability_class(30.0) == ReadabilityClass::Difficult);
    CHECK(readability_class(79.9999) == ReadabilityClass::Medium);
    CHECK(readability_class(59.635) == ReadabilityClass::Difficult);
    CHECK(readability_class(29.999) == ReadabilityClass::VeryDifficult);
    CHECK(readability_class(121.22) == ReadabilityClass::Easy);
    CHECK(readability_class(-40.0) == ReadabilityClass::VeryDifficult);
}

TEST_CASE("readability_class rejects non-finite scores") {
    CHECK_THROWS_AS(readability_class(std::numeric_limits<double>::quiet_NaN()), InputError);
    CHECK_THROWS_AS(readability_class(std::numeric_limits<double>::infinity()), InputError);
}

TEST_CASE("class names and figure aliases round-trip") {
    CHECK(readability_class_from_string("Easy") == ReadabilityClass::Easy);
    CHECK(readability_class_from_string("Low") == ReadabilityClass::Easy);
    CHECK(readability_class_from_string("High") == ReadabilityClass::Difficult);
    CHECK(readability_class_from_string("VeryHigh") == ReadabilityClass::VeryDifficult);
    CHECK(readability_class_from_string("bogus") == std::nullopt);
}

TEST_CASE("property: identical text gives identical annotation") {
    const char* text = "They should be able to marry. It is their right!";
    ReadabilityAnnotation a = flesch_score(text);
    ReadabilityAnnotation b = flesch_score(text);
    CHECK(a.words == b.words);
    CHECK(a.sentences == b.sentences);
    CHECK(a.syllables == b.syllables);
    CHECK(a.score == b.score);
    CHECK(a.cls == b.cls);
}

TEST_CASE("property: score strictly decreases as syllables grow") {
    for (int w : {1, 10, 100}) {
        for (int se : {1, 2, 5}) {
            double prev = flesch_from_counts(w, se, w);
            for (int sy = w + 1; sy <= w + 40; ++sy) {
                double cur = flesch_from_counts(w, se, sy);
                CHECK(cur < prev);
                prev = cur;
            }
        }
    }
}

TEST_CASE("property: syllables never fall below words") {
    std::mt19937 gen(2024);
    const char* vocab[] = {"a",    "the",   "cat",   "beautiful", "xyz",
                           "time", "move",  "yes",   "strength",  "idea",
                           "#tag", "@user", "don't", "HELLO",     "ok"};
    for (int trial = 0; trial < 200; ++trial) {
        std::ostringstream text;
        int n = 1 + static_cast<int>(gen() % 12);
        for (int i = 0; i < n; ++i) {
            text << vocab[gen() % (sizeof(vocab) / sizeof(vocab[0]))];
            text << (gen() % 5 == 0 ? ". " : " ");
        }
        ReadabilityAnnotation ann = flesch_score(text.str());
        CHECK(ann.syllables >= ann.words);
        CHECK(ann.words >= 1);
        CHECK(ann.sentences >= 1);
        CHECK_NOTHROW(readability_class(ann.score));
    }
}
