#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xsl/corpus.hpp"

namespace xsl {

struct ProbeOptions {
    std::size_t n_trials = 10;
    // Pairs [0, training_cutoff) are training input; probe contexts come from
    // the pairs after it.
    std::size_t training_cutoff = 1000;
    std::uint64_t seed = 1;  // picks the context pair among the candidates
};

// n_trials copies of one held-out context pair with probe_word added to the
// utterance and novel_referent added to the scene. The context contains
// neither the probe word nor any of its gold referents. Throws
// ConstructionError if the probe word is absent from the training prefix, the
// novel referent occurs in the corpus, or no context qualifies.
std::vector<InputPair> build_homonym_trials(const Corpus& corpus, const Word& probe_word,
                                            const Referent& novel_referent,
                                            const GoldLexicon& exclude,
                                            const ProbeOptions& options);

// As above with novel_word added to the utterance and target_referent to the
// scene. The context contains neither target_referent nor any of its gold labels.
std::vector<InputPair> build_synonym_trials(const Corpus& corpus, const Word& novel_word,
                                            const Referent& target_referent,
                                            const GoldLexicon& gold,
                                            const ProbeOptions& options);

struct CountRange {
    std::string label;
    std::size_t min_count = 0;
    std::size_t max_count = 0;  // inclusive; SIZE_MAX for open-ended

    bool contains(std::size_t c) const noexcept { return c >= min_count && c <= max_count; }
};

// <5, 5-20, >20 occurrences.
std::vector<CountRange> default_probe_ranges();

// Draws per_range distinct words from each range of training-prefix counts,
// restricted to words with gold entries. Words within a range are returned in
// lexicographic order. Throws ConstructionError if a range has too few words.
std::map<std::string, std::vector<Word>> select_probe_words(
    const std::map<Word, std::size_t>& counts, const GoldLexicon& gold,
    const std::vector<CountRange>& ranges, std::size_t per_range, std::uint64_t seed);

}  // namespace xsl
