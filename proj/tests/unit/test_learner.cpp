#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "xsl/error.hpp"
#include "xsl/generator.hpp"
#include "xsl/learner.hpp"

using namespace xsl;
using xsl::test::pair;
using xsl::test::refs;
using xsl::test::words;

namespace {

ModelConfig fas(double lambda = 0.01, std::size_t beta = 100) {
    return ModelConfig{Alignment::WordCompetition, Representation::ReferentConditional, lambda, beta};
}

Corpus small_corpus(std::size_t n, std::uint64_t seed, std::size_t vocab = 30) {
    CorpusSpec spec;
    spec.n_pairs = n;
    spec.word_vocab = vocab;
    spec.min_len = 1;
    spec.max_len = 4;
    spec.seed = seed;
    return generate_synthetic_corpus(spec).first;
}

double d(Real x) { return static_cast<double>(x); }

}  // namespace

TEST_CASE("model ids and labels") {
    const auto all = ModelConfig::all(0.01, 100);
    const char* ids[] = {"joint/joint", "wc/joint", "rc/joint", "joint/cond", "wc/cond", "rc/cond"};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(all[i].id() == ids[i]);
        CHECK(all[i].table_row() == static_cast<int>(i + 1));
        CHECK(ModelConfig::from_id(ids[i], 0.01, 100) == all[i]);
    }
    CHECK(all[4].label() == "a(w|r)p(r|w)");
    CHECK_THROWS_AS(ModelConfig::from_id("em", 0.01, 100), ConfigError);
    CHECK_THROWS_AS((ModelConfig{Alignment::Joint, Representation::Joint, 0.0, 100}.validate()), ConfigError);
    CHECK_THROWS_AS((ModelConfig{Alignment::Joint, Representation::Joint, 0.01, 0}.validate()), ConfigError);
}

TEST_CASE("fresh theta is uniform") {
    const LearnerState cond(fas());
    CHECK(d(theta(cond, Word("a"), Referent("A"))) == doctest::Approx(0.01));
    const LearnerState joint(ModelConfig{Alignment::Joint, Representation::Joint, 0.01, 100});
    CHECK(d(theta(joint, Word("a"), Referent("A"))) == doctest::Approx(0.0001));
    CHECK(d(meaning_probability(cond, Word("a"), Referent("A"))) == doctest::Approx(0.01));
    CHECK(d(meaning_probability(joint, Word("a"), Referent("A"))) == doctest::Approx(0.01));
    CHECK(meaning_vector(cond, Word("a")).empty());
}

TEST_CASE("alignment examples") {
    LearnerState s(fas());
    CHECK(d(align(s, pair({"w1"}, {"r1"})).at(Word("w1"), Referent("r1"))) == doctest::Approx(1.0));
    const auto t = align(s, pair({"w1", "w2"}, {"r1", "r2"}));
    for (Real v : t.cells) CHECK(d(v) == doctest::Approx(0.5));
    CHECK_THROWS(t.at(Word("w9"), Referent("r1")));
}

TEST_CASE("two-pair hand trace") {
    LearnerState s(fas());
    update(s, pair({"w1", "w2"}, {"r1", "r2"}, 1));
    for (const char* w : {"w1", "w2"}) {
        for (const char* r : {"r1", "r2"}) CHECK(d(s.assoc().get(Word(w), Referent(r))) == doctest::Approx(0.5));
    }
    // theta(r1|w1) = (0.5 + 0.01) / (1.0 + 100 * 0.01)
    CHECK(d(theta(s, Word("w1"), Referent("r1"))) == doctest::Approx(0.255));
    CHECK(d(theta(s, Word("w3"), Referent("r1"))) == doctest::Approx(0.01));

    const InputPair second = pair({"w1", "w3"}, {"r1", "r3"}, 2);
    const double expect = 0.255 / (0.255 + 0.01);
    CHECK(d(align(s, second).at(Word("w1"), Referent("r1"))) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(0.96226).epsilon(1e-5));

    update(s, second);
    CHECK(d(s.assoc().get(Word("w1"), Referent("r1"))) == doctest::Approx(0.5 + expect).epsilon(1e-12));
    CHECK(d(s.assoc().get(Word("w1"), Referent("r1"))) == doctest::Approx(1.46226).epsilon(1e-5));
    CHECK(s.step() == 2);

    const auto mv = meaning_vector(s, Word("w1"));
    REQUIRE(mv.size() == 3);
    CHECK(mv.at(Referent("r1")) > mv.at(Referent("r2")));
    CHECK(mv.at(Referent("r1")) > mv.at(Referent("r3")));
    CHECK(best_referent(s, Word("w1")) == Referent("r1"));
    CHECK_FALSE(best_referent(s, Word("zz")).has_value());
}

TEST_CASE("beta overflow leaves the state untouched") {
    LearnerState s(fas(0.01, 2));
    update(s, pair({"a"}, {"A"}));
    const LearnerState before = s;
    CHECK_THROWS_AS(update(s, pair({"b"}, {"B", "C"})), ConfigError);
    CHECK(s == before);
}

TEST_CASE("train checkpoints") {
    LearnerState s(fas(0.0002, 5000));
    const Corpus c = small_corpus(6000, 3, 200);
    std::size_t calls = 0;
    const auto cps = train(s, c, 100, [&](const LearnerState&) { return static_cast<double>(++calls); });
    CHECK(cps.size() == 60);
    CHECK(cps.front().step == 100);
    CHECK(cps.back().step == 6000);
    CHECK(calls == 60);
    CHECK(cps.back().payload == 60.0);

    LearnerState t(fas());
    CHECK(train(t, small_corpus(250, 3), 100).back().step == 250);
    CHECK(train(t, small_corpus(250, 3), 100).size() == 3);

    LearnerState fresh(fas());
    const LearnerState copy = fresh;
    CHECK(train(fresh, Corpus{}, 100).empty());
    CHECK(fresh == copy);
    CHECK_THROWS_AS(train(fresh, c, 0), ConfigError);
}

TEST_CASE("training is a left fold") {
    const Corpus c = small_corpus(300, 5);
    for (const auto& cfg : ModelConfig::all(0.01, 100)) {
        LearnerState whole(cfg), split(cfg);
        train(whole, c, 1000);
        train(split, c.slice(0, 137), 1000);
        train(split, c.slice(137, 300), 1000);
        CHECK(whole == split);
        LearnerState again(cfg);
        train(again, c, 7);
        CHECK(again == whole);
    }
}

TEST_CASE("state JSON round trip is bit-exact") {
    for (const auto& cfg : ModelConfig::all(0.0002, 5000)) {
        LearnerState s(cfg);
        train(s, small_corpus(200, 9), 1000);
        std::stringstream io;
        save_state(io, s);
        const LearnerState back = load_state(io);
        CHECK(back == s);
    }
    std::istringstream junk("{\"format\":\"other\"}");
    CHECK_THROWS_AS(load_state(junk), ParseError);
}

TEST_CASE("unambiguous word approaches probability 1") {
    std::vector<std::pair<WordSet, ReferentSet>> sets;
    for (int i = 0; i < 50; ++i) {
        const std::string k = std::to_string(i % 10);
        sets.emplace_back(WordSet{Word("ball"), Word("x" + k)}, ReferentSet{Referent("BALL"), Referent("X" + k)});
    }
    const Corpus c = Corpus::from_sets(std::move(sets), Provenance::File);
    LearnerState s(fas());
    train(s, c, 100);
    CHECK(d(meaning_probability(s, Word("ball"), Referent("BALL"))) > 0.9);
}

TEST_CASE("invariants over random corpora") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const Corpus c = small_corpus(150, seed);
        for (const auto& cfg : ModelConfig::all(0.01, 100)) {
            CAPTURE(cfg.id());
            LearnerState s(cfg);
            for (const auto& p : c.pairs) {
                const AlignmentTable t = align(s, p);
                const std::size_t nw = t.words.size(), nr = t.referents.size();
                if (cfg.alignment == Alignment::WordCompetition) {
                    for (std::size_t j = 0; j < nr; ++j) {
                        Real sum = 0;
                        for (std::size_t i = 0; i < nw; ++i) sum += t.at(i, j);
                        REQUIRE(std::abs(d(sum) - 1.0) < 1e-9);
                    }
                } else if (cfg.alignment == Alignment::ReferentCompetition) {
                    for (std::size_t i = 0; i < nw; ++i) {
                        Real sum = 0;
                        for (std::size_t j = 0; j < nr; ++j) sum += t.at(i, j);
                        REQUIRE(std::abs(d(sum) - 1.0) < 1e-9);
                    }
                }
                const AssocTable before = s.assoc();
                update(s, p);
                // Scores never decrease and stay inside the registries.
                before.for_each_cell([&](const Word& w, const Referent& r, Real v) {
                    REQUIRE(s.assoc().get(w, r) >= v);
                });
                s.assoc().for_each_cell([&](const Word& w, const Referent& r, Real v) {
                    REQUIRE(v >= 0);
                    REQUIRE(s.observed_words().contains(w));
                    REQUIRE(s.observed_referents().contains(r));
                });
            }
            s.assoc().for_each_row([&](const Word&, const AssocTable::Row& cells, Real sum) {
                Real total = 0;
                for (const auto& [r, v] : cells) total += v;
                REQUIRE(std::abs(d(total - sum)) <= 1e-9 * std::max(1.0, d(sum)));
            });
            if (cfg.representation == Representation::ReferentConditional) {
                // theta over the observed referents plus the unseen slots sums to 1.
                for (const auto& w : s.observed_words()) {
                    Real total = 0;
                    for (const auto& r : s.observed_referents()) total += theta(s, w, r);
                    total += theta_unseen(s, w) * static_cast<Real>(cfg.beta - s.observed_referents().size());
                    REQUIRE(std::abs(d(total) - 1.0) < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("conditional theta is invariant to scaling assoc and lambda together") {
    LearnerState s(fas(0.01, 100));
    train(s, small_corpus(100, 2), 1000);
    const Real c = 7.5;
    AssocTable scaled;
    s.assoc().for_each_cell([&](const Word& w, const Referent& r, Real v) { scaled.add(w, r, v * c); });
    const LearnerState t(fas(0.01 * 7.5, 100), scaled, s.observed_words(), s.observed_referents(), s.step());
    for (const auto& w : s.observed_words()) {
        for (const auto& r : s.observed_referents()) {
            REQUIRE(d(theta(t, w, r)) == doctest::Approx(d(theta(s, w, r))).epsilon(1e-12));
        }
    }
}

TEST_CASE("relabelling symbols permutes the learned scores") {
    // Swap the names of two words and two referents throughout the corpus.
    const Corpus c = small_corpus(200, 4, 12);
    auto sw = [](const Word& w) {
        if (w.str() == "w01") return Word("w02");
        if (w.str() == "w02") return Word("w01");
        return w;
    };
    auto sr = [](const Referent& r) {
        if (r.str() == "W01") return Referent("W02");
        if (r.str() == "W02") return Referent("W01");
        return r;
    };
    std::vector<std::pair<WordSet, ReferentSet>> sets;
    for (const auto& p : c.pairs) {
        WordSet u;
        ReferentSet sc;
        for (const auto& w : p.utterance) u.insert(sw(w));
        for (const auto& r : p.scene) sc.insert(sr(r));
        sets.emplace_back(u, sc);
    }
    const Corpus swapped = Corpus::from_sets(std::move(sets), c.provenance);
    for (const auto& cfg : ModelConfig::all(0.01, 100)) {
        LearnerState a(cfg), b(cfg);
        train(a, c, 1000);
        train(b, swapped, 1000);
        a.assoc().for_each_cell([&](const Word& w, const Referent& r, Real v) {
            REQUIRE(d(b.assoc().get(sw(w), sr(r))) == doctest::Approx(d(v)).epsilon(1e-12));
        });
    }
}

TEST_CASE("joint/joint scores overflow into an error, not infinity") {
    LearnerState s(ModelConfig{Alignment::Joint, Representation::Joint, 0.01, 100});
    const InputPair p = pair({"a"}, {"A"});
    bool threw = false;
    for (int i = 0; i < 40000 && !threw; ++i) {
        try {
            update(s, p);
        } catch (const Error&) {
            threw = true;
        }
    }
    CHECK(threw);
    CHECK(std::isfinite(d(std::log(s.assoc().get(Word("a"), Referent("A"))))));
}
