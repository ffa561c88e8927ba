#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "stancebias/corpus.hpp"
#include "stancebias/errors.hpp"

using namespace stancebias;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
    fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

StanceRecord make_record(const std::string& id, Stance stance, const std::string& group_marker) {
    StanceRecord r;
    r.id = id;
    r.text = "text for " + id + " " + group_marker;
    r.target = "Topic";
    r.gold_stance = stance;
    r.dataset_tag = "synth";
    return r;
}

// group A records carry "ga" in the text, group B "gb"
Corpus make_two_group_corpus(int a_favor, int a_against, int b_favor, int b_against) {
    std::vector<StanceRecord> records;
    int n = 0;
    for (int i = 0; i < a_favor; ++i) records.push_back(make_record("a" + std::to_string(n++), Stance::Favor, "ga"));
    for (int i = 0; i < a_against; ++i) records.push_back(make_record("a" + std::to_string(n++), Stance::Against, "ga"));
    for (int i = 0; i < b_favor; ++i) records.push_back(make_record("b" + std::to_string(n++), Stance::Favor, "gb"));
    for (int i = 0; i < b_against; ++i) records.push_back(make_record("b" + std::to_string(n++), Stance::Against, "gb"));
    return Corpus(std::move(records));
}

bool in_group_a(const StanceRecord& r) { return r.text.find("ga") != std::string::npos; }

double favor_ratio(const Corpus& c, bool group_a) {
    int favor = 0;
    int total = 0;
    for (const StanceRecord& r : c) {
        if (in_group_a(r) != group_a) continue;
        ++total;
        if (r.gold_stance == Stance::Favor) ++favor;
    }
    return total == 0 ? 0.0 : static_cast<double>(favor) / total;
}

int group_count(const Corpus& c, bool group_a) {
    int n = 0;
    for (const StanceRecord& r : c) {
        if (in_group_a(r) == group_a) ++n;
    }
    return n;
}

} // namespace

TEST_CASE("load_csv parses rows and synthesizes ids") {
    fs::path path = write_temp("ok.csv",
                               "Tweet,Target,Stance\n"
                               "I love him,Donald Trump,FAVOR\n"
                               "\"quoted, with comma\",Joe Biden,against\n");
    Corpus corpus = load_dataset(path, DatasetFormat::PStanceCsv);
    REQUIRE(corpus.size() == 2);
    CHECK(corpus.records()[0].id == "pstance:1");
    CHECK(corpus.records()[0].gold_stance == Stance::Favor);
    CHECK(corpus.records()[1].text == "quoted, with comma");
    CHECK(corpus.records()[1].gold_stance == Stance::Against);
    CHECK(corpus.records()[1].target == "Joe Biden");
}

TEST_CASE("load_csv header-only file yields an empty corpus") {
    fs::path path = write_temp("empty.csv", "Tweet,Target,Stance\n");
    Corpus corpus = load_dataset(path, DatasetFormat::PStanceCsv);
    CHECK(corpus.empty());
}

TEST_CASE("load_csv rejects a NONE stance with the row number") {
    fs::path path = write_temp("none.csv",
                               "Tweet,Target,Stance\n"
                               "ok,T,FAVOR\n"
                               "bad,T,NONE\n");
    CHECK_THROWS_WITH_AS(load_dataset(path, DatasetFormat::PStanceCsv),
                         doctest::Contains("row 2"), RowError);
}

TEST_CASE("load_csv names the missing column") {
    fs::path path = write_temp("nostance.csv", "Tweet,Target\nx,T\n");
    CHECK_THROWS_WITH_AS(load_dataset(path, DatasetFormat::PStanceCsv),
                         doctest::Contains("Stance"), SchemaError);
}

TEST_CASE("load_dataset reports unreadable files") {
    CHECK_THROWS_AS(load_dataset(fs::temp_directory_path() / "missing.csv", DatasetFormat::ScdCsv),
                    IoError);
}

TEST_CASE("quoted fields may span lines and escape quotes") {
    fs::path path = write_temp("multiline.csv",
                               "post,topic,stance\n"
                               "\"line one\nline two \"\"quoted\"\"\",abortion,FAVOR\n");
    Corpus corpus = load_dataset(path, DatasetFormat::ScdCsv);
    REQUIRE(corpus.size() == 1);
    CHECK(corpus.records()[0].text == "line one\nline two \"quoted\"");
}

TEST_CASE("kemlm profile keeps the file id") {
    fs::path path = write_temp("kemlm.csv",
                               "tweet_id,text,target,label\n"
                               "555,some tweet,Joe Biden,FAVOR\n");
    Corpus corpus = load_dataset(path, DatasetFormat::KemlmCsv);
    REQUIRE(corpus.size() == 1);
    CHECK(corpus.records()[0].id == "kemlm:555");
}

TEST_CASE("duplicate ids are rejected") {
    fs::path path = write_temp("dup.jsonl",
                               R"({"id":"x","text":"a","target":"T","stance":"FAVOR","dataset":"d"})"
                               "\n"
                               R"({"id":"x","text":"b","target":"T","stance":"AGAINST","dataset":"d"})"
                               "\n");
    CHECK_THROWS_WITH_AS(load_canonical_jsonl(path), doctest::Contains("duplicate"), RowError);
}

TEST_CASE("canonical round-trip preserves record content") {
    fs::path path = write_temp("rt.jsonl", "");
    std::vector<StanceRecord> records;
    StanceRecord r = make_record("rt:1", Stance::Favor, "ga");
    ReadabilityAnnotation read;
    read.words = 5;
    read.sentences = 1;
    read.syllables = 8;
    read.score = 70.25;
    read.cls = ReadabilityClass::Medium;
    DialectAnnotation dia;
    dia.theta = CategoryWeights{0.4, 0.2, 0.1, 0.3};
    dia.label = DialectLabel::AAE;
    dia.in_vocab_tokens = 4;
    r.annotation = AttributeAnnotation{read, dia};
    records.push_back(r);
    records.push_back(make_record("rt:2", Stance::Against, "gb"));

    Corpus original(std::move(records));
    write_canonical(original, path);
    Corpus loaded = load_canonical_jsonl(path);
    REQUIRE(loaded.size() == original.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        const StanceRecord& a = original.records()[i];
        const StanceRecord& b = loaded.records()[i];
        CHECK(a.id == b.id);
        CHECK(a.text == b.text);
        CHECK(a.target == b.target);
        CHECK(a.gold_stance == b.gold_stance);
        CHECK(a.dataset_tag == b.dataset_tag);
        CHECK(a.annotation.has_value() == b.annotation.has_value());
    }
    const auto& ann = loaded.records()[0].annotation;
    REQUIRE(ann.has_value());
    REQUIRE(ann->readability.has_value());
    CHECK(ann->readability->score == 70.25);
    REQUIRE(ann->dialect.has_value());
    CHECK(ann->dialect->label == DialectLabel::AAE);
    CHECK((*ann->dialect->theta)[0] == 0.4);
}

TEST_CASE("balance downsamples the majority and matches the favor ratio") {
    // 160 favor + 240 against in A; 12 favor + 21 against in B
    Corpus corpus = make_two_group_corpus(160, 240, 12, 21);
    Corpus balanced = balance_two_group(corpus, in_group_a, 7);
    CHECK(group_count(balanced, true) == 33);
    CHECK(group_count(balanced, false) == 33);
    double diff = std::abs(favor_ratio(balanced, true) - favor_ratio(balanced, false));
    CHECK(diff <= 1.0 / 33.0 + 1e-12);
}

TEST_CASE("balance is deterministic and idempotent for a fixed seed") {
    Corpus corpus = make_two_group_corpus(50, 30, 10, 6);
    Corpus once = balance_two_group(corpus, in_group_a, 42);
    Corpus again = balance_two_group(corpus, in_group_a, 42);
    REQUIRE(once.size() == again.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once.records()[i].id == again.records()[i].id);
    }
    // applying the balance to its own output changes nothing
    Corpus twice = balance_two_group(once, in_group_a, 42);
    REQUIRE(twice.size() == once.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(twice.records()[i].id == once.records()[i].id);
    }
    // a different seed picks a different majority subset
    Corpus other = balance_two_group(corpus, in_group_a, 43);
    bool same = once.size() == other.size();
    if (same) {
        for (std::size_t i = 0; i < once.size(); ++i) {
            if (once.records()[i].id != other.records()[i].id) {
                same = false;
                break;
            }
        }
    }
    CHECK_FALSE(same);
}

TEST_CASE("already balanced groups with identical ratios pass through") {
    Corpus corpus = make_two_group_corpus(6, 4, 6, 4);
    Corpus balanced = balance_two_group(corpus, in_group_a, 1);
    REQUIRE(balanced.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CHECK(balanced.records()[i].id == corpus.records()[i].id);
    }
}

TEST_CASE("balance error paths") {
    // group B empty
    Corpus only_a = make_two_group_corpus(5, 5, 0, 0);
    CHECK_THROWS_AS(balance_two_group(only_a, in_group_a, 0), BalanceError);

    // group B lacks Favor entirely while A has it
    Corpus no_favor_b = make_two_group_corpus(5, 5, 0, 4);
    CHECK_THROWS_WITH_AS(balance_two_group(no_favor_b, in_group_a, 0),
                         doctest::Contains("Favor"), BalanceError);

    // majority cannot supply the favor stratum
    Corpus short_favor = make_two_group_corpus(2, 48, 10, 2);
    CHECK_THROWS_WITH_AS(balance_two_group(short_favor, in_group_a, 0),
                         doctest::Contains("Favor"), BalanceError);
}

TEST_CASE("attach_annotations joins by id and reports missing ids") {
    Corpus corpus = make_two_group_corpus(2, 1, 0, 0);
    std::map<std::string, AttributeAnnotation> annotations;
    for (const StanceRecord& r : corpus) {
        AttributeAnnotation ann;
        ReadabilityAnnotation read;
        read.words = 3;
        read.sentences = 1;
        read.syllables = 4;
        read.score = 90.0;
        read.cls = ReadabilityClass::Easy;
        ann.readability = read;
        annotations[r.id] = ann;
    }
    Corpus annotated = attach_annotations(corpus, annotations);
    REQUIRE(annotated.size() == 3);
    for (std::size_t i = 0; i < annotated.size(); ++i) {
        CHECK(annotated.records()[i].id == corpus.records()[i].id);  // order unchanged
        CHECK(annotated.records()[i].annotation.has_value());
    }

    annotations.erase(corpus.records()[1].id);
    CHECK_THROWS_WITH_AS(attach_annotations(corpus, annotations),
                         doctest::Contains(corpus.records()[1].id.c_str()), JoinError);

    Corpus empty;
    CHECK(attach_annotations(empty, {}).empty());
}

TEST_CASE("per-target index preserves load order") {
    std::vector<StanceRecord> records;
    StanceRecord a = make_record("t:1", Stance::Favor, "ga");
    a.target = "Alpha";
    StanceRecord b = make_record("t:2", Stance::Favor, "ga");
    b.target = "Beta";
    StanceRecord c = make_record("t:3", Stance::Against, "ga");
    c.target = "Alpha";
    records = {a, b, c};
    Corpus corpus(std::move(records));
    CHECK(corpus.targets() == std::vector<std::string>{"Alpha", "Beta"});
    CHECK(corpus.indices_for_target("Alpha") == std::vector<std::size_t>{0, 2});
    CHECK(corpus.indices_for_target("Gamma").empty());
}
