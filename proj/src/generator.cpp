#include "xsl/generator.hpp"

#include <cmath>
#include <string>

#include "xsl/error.hpp"
#include "xsl/random.hpp"

namespace xsl {

void CorpusSpec::validate() const {
    if (min_len == 0) throw ConfigError("utterance min length must be >= 1");
    if (min_len > max_len) throw ConfigError("utterance min length exceeds max length");
    if (word_vocab < max_len) {
        throw ConfigError("word vocabulary (" + std::to_string(word_vocab) +
                          ") is smaller than the max utterance length (" +
                          std::to_string(max_len) + ")");
    }
    if (!(zipf_exponent > 0.0) || !std::isfinite(zipf_exponent)) {
        throw ConfigError("zipf exponent must be a finite positive number");
    }
}

Word synthetic_word(std::size_t rank, std::size_t vocab) {
    const std::size_t width = std::to_string(vocab).size();
    std::string digits = std::to_string(rank + 1);
    return Word("w" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits);
}

GoldLexicon synthetic_lexicon(const CorpusSpec& spec) {
    WordSet vocab;
    for (std::size_t k = 0; k < spec.word_vocab; ++k) vocab.insert(synthetic_word(k, spec.word_vocab));
    return GoldLexicon::identity(vocab);
}

std::pair<Corpus, GoldLexicon> generate_synthetic_corpus(const CorpusSpec& spec) {
    spec.validate();
    GoldLexicon lexicon = synthetic_lexicon(spec);

    std::vector<Word> words;
    words.reserve(spec.word_vocab);
    for (std::size_t k = 0; k < spec.word_vocab; ++k) words.push_back(synthetic_word(k, spec.word_vocab));

    const ZipfSampler zipf(spec.word_vocab, spec.zipf_exponent);
    Rng rng(spec.seed);

    std::vector<std::pair<WordSet, ReferentSet>> sets;
    sets.reserve(spec.n_pairs);
    for (std::size_t i = 0; i < spec.n_pairs; ++i) {
        const auto len = static_cast<std::size_t>(rng.uniform_int(spec.min_len, spec.max_len));
        WordSet utterance;
        for (std::size_t rank : zipf.sample_distinct(rng, len)) utterance.insert(words[rank]);
        ReferentSet scene = derive_scene_from_gold(utterance, lexicon);
        sets.emplace_back(std::move(utterance), std::move(scene));
    }
    return {Corpus::from_sets(std::move(sets), Provenance::Synthetic), std::move(lexicon)};
}

}  // namespace xsl
