#pragma once

#include <cstdint>
#include <utility>

#include "xsl/corpus.hpp"

namespace xsl {

// Parameters of the synthetic child-directed corpus surrogate.
//
// Utterance lengths are uniform on [min_len, max_len]; mean_len() is therefore
// their midpoint. Word tokens are "w0001".."wNNNN" ordered by Zipf rank and the
// gold lexicon maps each one-to-one onto its upper-cased spelling.
struct CorpusSpec {
    std::size_t n_pairs = 18000;
    std::size_t word_vocab = 4000;
    std::size_t min_len = 2;
    std::size_t max_len = 6;
    double zipf_exponent = 1.0;
    std::uint64_t seed = 1;

    double mean_len() const noexcept { return 0.5 * static_cast<double>(min_len + max_len); }

    // Throws ConfigError when the spec is infeasible.
    void validate() const;

    friend bool operator==(const CorpusSpec&, const CorpusSpec&) = default;
};

// Token for Zipf rank k (0-based).
Word synthetic_word(std::size_t rank, std::size_t vocab);

// The one-to-one gold lexicon over the whole synthetic vocabulary.
GoldLexicon synthetic_lexicon(const CorpusSpec& spec);

// Pure function of the spec: same spec, same corpus.
std::pair<Corpus, GoldLexicon> generate_synthetic_corpus(const CorpusSpec& spec);

}  // namespace xsl
