#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "xsl/corpus.hpp"
#include "xsl/error.hpp"

using namespace xsl;
using xsl::test::pair;
using xsl::test::refs;
using xsl::test::words;

namespace {

Corpus numbered(std::size_t n) {
    std::vector<std::pair<WordSet, ReferentSet>> sets;
    for (std::size_t i = 1; i <= n; ++i) {
        sets.emplace_back(WordSet{Word("u" + std::to_string(i))}, ReferentSet{Referent("S" + std::to_string(i))});
    }
    return Corpus::from_sets(std::move(sets), Provenance::Synthetic);
}

}  // namespace

TEST_CASE("symbols") {
    CHECK_THROWS_AS(Word(""), Error);
    CHECK_THROWS_AS(Word("a b"), Error);
    CHECK(Word("Ray").str() == "Ray");
    CHECK_FALSE(Word("ray") == Word("Ray"));
    CHECK(novel_referent("DAX").str() == "!DAX");
    CHECK(novel_referent("DAX").reserved());
    CHECK_FALSE(Referent("DAX").reserved());
}

TEST_CASE("pairs-text load") {
    std::istringstream in("ray eats\nRAY EATS\n\nthe the dog\nTHE DOG\n");
    const Corpus c = load_corpus(in, CorpusFormat::PairsText);
    REQUIRE(c.size() == 2);
    CHECK(c.pairs[0] == pair({"ray", "eats"}, {"RAY", "EATS"}, 1));
    CHECK(c.pairs[1].utterance == words({"the", "dog"}));
    CHECK(c.pairs[1].index == 2);
    CHECK(c.provenance == Provenance::File);
}

TEST_CASE("pairs-text errors carry line numbers") {
    SUBCASE("three-line record") {
        std::istringstream in("a\nA\n\nb\nB\nC\n");
        try {
            load_corpus(in, CorpusFormat::PairsText);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 6);
        }
    }
    SUBCASE("reserved symbol") {
        std::istringstream in("a\nA\n\n!b\nB\n");
        try {
            load_corpus(in, CorpusFormat::PairsText);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
        }
    }
    SUBCASE("empty") {
        std::istringstream in("\n\n");
        CHECK_THROWS_AS(load_corpus(in, CorpusFormat::PairsText), ParseError);
    }
}

TEST_CASE("jsonl load and errors") {
    std::istringstream in("{\"u\":[\"a\",\"b\",\"a\"],\"s\":[\"A\"]}\n\n{\"u\":[\"c\"],\"s\":[\"C\"]}\n");
    const Corpus c = load_corpus(in, CorpusFormat::Jsonl);
    REQUIRE(c.size() == 2);
    CHECK(c.pairs[0].utterance == words({"a", "b"}));
    CHECK(c.pairs[1].index == 2);

    std::istringstream bad("{\"u\":[\"a\"],\"s\":[\"A\"]}\n{\"u\":[\"a\"]}\n");
    try {
        load_corpus(bad, CorpusFormat::Jsonl);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("corpus save/load round trip in both formats") {
    const Corpus c = Corpus::from_sets({{words({"x", "y"}), refs({"X", "Y"})}, {words({"z"}), refs({"Z", "W"})}},
                                       Provenance::File);
    for (auto f : {CorpusFormat::PairsText, CorpusFormat::Jsonl}) {
        std::stringstream s;
        save_corpus(s, c, f);
        CHECK(load_corpus(s, f) == c);
    }
}

TEST_CASE("6000 records load with indices 1..6000") {
    std::ostringstream text;
    for (int i = 0; i < 6000; ++i) text << "w" << i % 7 << "\nR" << i % 5 << "\n\n";
    std::istringstream in(text.str());
    const Corpus c = load_corpus(in, CorpusFormat::PairsText);
    REQUIRE(c.size() == 6000);
    for (std::size_t i = 0; i < c.size(); ++i) REQUIRE(c.pairs[i].index == i + 1);
}

TEST_CASE("format and provenance names") {
    CHECK(corpus_format_from_string("jsonl") == CorpusFormat::Jsonl);
    CHECK(corpus_format_from_string("pairs-text") == CorpusFormat::PairsText);
    CHECK_THROWS_AS(corpus_format_from_string("xml"), ConfigError);
    for (auto p : {Provenance::Base, Provenance::RuPlus, Provenance::LuPlus, Provenance::Synthetic, Provenance::File}) {
        CHECK(provenance_from_string(to_string(p)) == p);
    }
}

TEST_CASE("lexicon") {
    std::istringstream in("# comment\nbat BAT-ANIMAL BAT-CLUB\nball BALL\nball BALL\n");
    const GoldLexicon lex = load_lexicon(in);
    CHECK(lex.size() == 2);
    CHECK(lex.referents(Word("bat")) == refs({"BAT-ANIMAL", "BAT-CLUB"}));
    CHECK(lex.labels_of(Referent("BALL")) == std::vector<Word>{Word("ball")});
    CHECK_THROWS_AS(lex.referents(Word("cat")), MissingEntryError);

    std::stringstream s;
    save_lexicon(s, lex);
    CHECK(load_lexicon(s).entries() == lex.entries());

    std::istringstream bad("ball\n");
    CHECK_THROWS_AS(load_lexicon(bad), ParseError);
}

TEST_CASE("derive_scene_from_gold") {
    const GoldLexicon id = GoldLexicon::identity(words({"Ray", "eats", "an", "apple"}));
    CHECK(derive_scene_from_gold(words({"Ray", "eats", "an", "apple"}), id) == refs({"RAY", "EATS", "AN", "APPLE"}));
    CHECK_THROWS_AS(derive_scene_from_gold(WordSet{}, id), Error);

    GoldLexicon hom;
    hom.add(Word("bat"), refs({"BAT-ANIMAL", "BAT-CLUB"}));
    CHECK(derive_scene_from_gold(words({"bat"}), hom) == refs({"BAT-ANIMAL", "BAT-CLUB"}));
    try {
        derive_scene_from_gold(words({"bat", "owl"}), hom);
        FAIL("expected MissingEntryError");
    } catch (const MissingEntryError& e) {
        CHECK(std::string(e.what()).find("owl") != std::string::npos);
    }
}

TEST_CASE("subsample_every_third") {
    CHECK(subsample_every_third(numbered(9)).pairs.size() == 3);
    const Corpus ten = subsample_every_third(numbered(10));
    REQUIRE(ten.size() == 4);
    const char* expect[] = {"u1", "u4", "u7", "u10"};
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(ten.pairs[k].utterance == WordSet{Word(expect[k])});
        CHECK(ten.pairs[k].index == k + 1);
    }
    CHECK(subsample_every_third(numbered(3)).size() == 1);
    CHECK(ten.provenance == Provenance::Base);
}

TEST_CASE("ru_plus and lu_plus examples") {
    const Corpus c = Corpus::from_sets(
        {{words({"a", "b"}), refs({"A"})}, {words({"c", "d"}), refs({"B"})}, {words({"e", "f"}), refs({"C"})}},
        Provenance::Base);
    const Corpus ru = make_ru_plus(c);
    REQUIRE(ru.size() == 1);
    CHECK(ru.pairs[0].utterance == words({"a", "b"}));
    CHECK(ru.pairs[0].scene == refs({"A", "B", "C"}));
    CHECK(ru.provenance == Provenance::RuPlus);

    const Corpus lu = make_lu_plus(c);
    CHECK(lu.pairs[0].utterance == words({"a", "b", "c", "d", "e", "f"}));
    CHECK(lu.pairs[0].scene == refs({"A"}));
    CHECK(lu.provenance == Provenance::LuPlus);

    const Corpus same = Corpus::from_sets(
        {{words({"a"}), refs({"A"})}, {words({"a"}), refs({"A"})}, {words({"a"}), refs({"A"})}}, Provenance::Base);
    CHECK(make_ru_plus(same).pairs[0].scene == refs({"A"}));
    CHECK(make_lu_plus(same).pairs[0].utterance == words({"a"}));

    CHECK_THROWS_AS(make_ru_plus(numbered(2)), ConfigError);
    CHECK_THROWS_AS(make_lu_plus(numbered(2)), ConfigError);
}

TEST_CASE("transform invariants") {
    for (std::size_t n = 3; n <= 20; ++n) {
        const Corpus c = numbered(n);
        const Corpus base = subsample_every_third(c);
        const Corpus ru = make_ru_plus(c);
        const Corpus lu = make_lu_plus(c);
        CAPTURE(n);
        REQUIRE(base.size() == (n + 2) / 3);
        REQUIRE(ru.size() == base.size());
        REQUIRE(lu.size() == base.size());
        for (std::size_t k = 0; k < base.size(); ++k) {
            CHECK(ru.pairs[k].utterance == base.pairs[k].utterance);
            CHECK(lu.pairs[k].scene == base.pairs[k].scene);
            CHECK(std::includes(ru.pairs[k].scene.begin(), ru.pairs[k].scene.end(), base.pairs[k].scene.begin(),
                                base.pairs[k].scene.end()));
            CHECK(std::includes(lu.pairs[k].utterance.begin(), lu.pairs[k].utterance.end(),
                                base.pairs[k].utterance.begin(), base.pairs[k].utterance.end()));
        }
    }
}

TEST_CASE("word_counts, slice, concat") {
    const Corpus c = Corpus::from_sets(
        {{words({"a", "b"}), refs({"A"})}, {words({"a"}), refs({"A"})}, {words({"c"}), refs({"C"})}}, Provenance::File);
    const auto counts = word_counts(c);
    CHECK(counts.at(Word("a")) == 2);
    CHECK(counts.at(Word("c")) == 1);
    const Corpus tail = c.slice(1, 3);
    CHECK(tail.size() == 2);
    CHECK(tail.pairs[0].index == 1);
    CHECK(c.slice(0, 1).concat(tail) == c);
}
