#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "xsl/corpus.hpp"
#include "xsl/error.hpp"
#include "xsl/generator.hpp"
#include "xsl/random.hpp"

using namespace xsl;

namespace {

// Sequential draw without replacement by scanning the untaken ranks in order.
std::vector<std::size_t> scan_distinct(const ZipfSampler& z, Rng& rng, std::size_t count) {
    std::vector<bool> taken(z.size(), false);
    std::vector<std::size_t> out;
    double taken_mass = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double target = rng.uniform01() * (1.0 - taken_mass);
        double acc = 0.0;
        std::size_t pick = z.size();
        for (std::size_t k = 0; k < z.size(); ++k) {
            if (taken[k]) continue;
            acc += z.probability(k);
            if (acc > target) {
                pick = k;
                break;
            }
        }
        if (pick == z.size()) {
            pick = z.size() - 1;
            while (taken[pick]) --pick;
        }
        taken[pick] = true;
        taken_mass += z.probability(pick);
        out.push_back(pick);
    }
    return out;
}

std::string dump(const Corpus& c) {
    std::ostringstream s;
    save_corpus(s, c, CorpusFormat::Jsonl);
    return s.str();
}

}  // namespace

TEST_CASE("rng is deterministic and seeds are separated") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        (void)c.next();
    }
    CHECK(Rng(42).next() != Rng(43).next());
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("uniform_index stays in range and covers it") {
    Rng r(7);
    std::vector<int> hits(6, 0);
    for (int i = 0; i < 6000; ++i) {
        const auto k = r.uniform_index(6);
        REQUIRE(k < 6);
        ++hits[k];
    }
    for (int h : hits) CHECK(h > 800);
    CHECK_THROWS(r.uniform_index(0));
    for (int i = 0; i < 100; ++i) {
        const auto v = r.uniform_int(2, 6);
        CHECK(v >= 2);
        CHECK(v <= 6);
    }
}

TEST_CASE("zipf probabilities") {
    const ZipfSampler z(500, 1.0);
    double total = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) total += z.probability(k);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(z.probability(0) / z.probability(1) == doctest::Approx(2.0));
    CHECK(z.probability(0) / z.probability(9) == doctest::Approx(10.0));
    CHECK_THROWS_AS(ZipfSampler(0, 1.0), ConfigError);
    CHECK_THROWS_AS(ZipfSampler(10, 0.0), ConfigError);
}

TEST_CASE("sample_distinct matches a linear scan on the same stream") {
    for (double s : {0.7, 1.0, 1.5}) {
        const ZipfSampler z(60, s);
        Rng a(99), b(99);
        for (int draw = 0; draw < 400; ++draw) {
            const std::size_t count = 1 + static_cast<std::size_t>(draw % 8);
            const auto got = z.sample_distinct(a, count);
            const auto want = scan_distinct(z, b, count);
            REQUIRE(got == want);
            REQUIRE(std::set<std::size_t>(got.begin(), got.end()).size() == count);
        }
    }
    Rng r(1);
    const ZipfSampler small(5, 1.0);
    auto all = small.sample_distinct(r, 5);
    std::sort(all.begin(), all.end());
    CHECK(all == std::vector<std::size_t>{0, 1, 2, 3, 4});
    CHECK_THROWS_AS(small.sample_distinct(r, 6), ConfigError);
}

TEST_CASE("corpus spec validation") {
    CorpusSpec s;
    CHECK_NOTHROW(s.validate());
    CHECK(s.mean_len() == 4.0);
    s.word_vocab = 5;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = CorpusSpec{};
    s.min_len = 7;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = CorpusSpec{};
    s.zipf_exponent = -1;
    CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("generator is a pure function of its spec") {
    CorpusSpec spec;
    spec.n_pairs = 500;
    spec.word_vocab = 300;
    spec.seed = 7;
    const auto a = generate_synthetic_corpus(spec);
    const auto b = generate_synthetic_corpus(spec);
    CHECK(dump(a.first) == dump(b.first));
    spec.seed = 8;
    CHECK(dump(generate_synthetic_corpus(spec).first) != dump(a.first));
}

TEST_CASE("generated pairs respect their CorpusSpec") {
    CorpusSpec spec;
    spec.n_pairs = 6000;
    spec.word_vocab = 1000;
    const auto [corpus, gold] = generate_synthetic_corpus(spec);
    REQUIRE(corpus.size() == 6000);
    CHECK(corpus.provenance == Provenance::Synthetic);
    CHECK(gold.size() == 1000);
    for (const auto& p : corpus.pairs) {
        REQUIRE(p.utterance.size() >= spec.min_len);
        REQUIRE(p.utterance.size() <= spec.max_len);
        REQUIRE(p.scene == derive_scene_from_gold(p.utterance, gold));
        for (const auto& w : p.utterance) REQUIRE_FALSE(w.reserved());
    }
    CHECK(synthetic_word(0, 1000).str() == "w0001");
    CHECK(gold.referents(Word("w0001")) == ReferentSet{Referent("W0001")});
}

TEST_CASE("rank-frequency slope is close to the zipf exponent") {
    // Fit log count against log rank over ranks 10..300, where counts are large
    // and the distinct-per-utterance constraint has little effect.
    for (double s : {0.8, 1.0, 1.2}) {
        CorpusSpec spec;
        spec.n_pairs = 60000;
        spec.word_vocab = 2000;
        spec.zipf_exponent = s;
        spec.seed = 11;
        const auto [corpus, gold] = generate_synthetic_corpus(spec);
        const auto counts = word_counts(corpus);
        std::vector<std::size_t> sorted;
        for (const auto& [w, c] : counts) sorted.push_back(c);
        std::sort(sorted.rbegin(), sorted.rend());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (std::size_t rank = 10; rank <= 300; ++rank) {
            const double x = std::log(static_cast<double>(rank));
            const double y = std::log(static_cast<double>(sorted[rank - 1]));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++n;
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        CAPTURE(s);
        CAPTURE(slope);
        CHECK(std::abs(-slope - s) <= 0.1 * s);
    }
}
