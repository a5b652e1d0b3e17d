#include "xsl/probes.hpp"

#include <algorithm>
#include <limits>

#include "xsl/error.hpp"
#include "xsl/random.hpp"

namespace xsl {

namespace {

bool scene_has(const Corpus& corpus, const Referent& r) {
    return std::any_of(corpus.pairs.begin(), corpus.pairs.end(),
                       [&](const InputPair& p) { return p.scene.contains(r); });
}

bool utterance_has(const Corpus& corpus, const Word& w) {
    return std::any_of(corpus.pairs.begin(), corpus.pairs.end(),
                       [&](const InputPair& p) { return p.utterance.contains(w); });
}

template <class Pred>
std::vector<InputPair> build_trials(const Corpus& corpus, const ProbeOptions& options,
                                    const std::string& what, Pred qualifies,
                                    const Word& add_word, const Referent& add_referent) {
    if (options.n_trials == 0) throw ConstructionError("n_trials must be at least 1");
    if (options.training_cutoff == 0) throw ConstructionError("training cutoff must be at least 1");
    std::vector<const InputPair*> candidates;
    for (std::size_t i = options.training_cutoff; i < corpus.pairs.size(); ++i) {
        if (qualifies(corpus.pairs[i])) candidates.push_back(&corpus.pairs[i]);
    }
    if (candidates.empty()) {
        throw ConstructionError("no held-out context pair for " + what + " after pair " +
                                std::to_string(options.training_cutoff) + " (found 0, need 1)");
    }
    Rng rng(options.seed);
    InputPair context = *candidates[rng.uniform_index(candidates.size())];
    context.utterance.insert(add_word);
    context.scene.insert(add_referent);

    std::vector<InputPair> trials(options.n_trials, context);
    for (std::size_t i = 0; i < trials.size(); ++i) trials[i].index = i + 1;
    return trials;
}

bool in_prefix(const Corpus& corpus, std::size_t cutoff, const Word& w) {
    const std::size_t n = std::min(cutoff, corpus.pairs.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (corpus.pairs[i].utterance.contains(w)) return true;
    }
    return false;
}

}  // namespace

std::vector<InputPair> build_homonym_trials(const Corpus& corpus, const Word& probe_word,
                                            const Referent& novel_referent,
                                            const GoldLexicon& exclude,
                                            const ProbeOptions& options) {
    if (!in_prefix(corpus, options.training_cutoff, probe_word)) {
        throw ConstructionError("probe word '" + probe_word.str() + "' does not occur in the training pairs");
    }
    if (scene_has(corpus, novel_referent)) {
        throw ConstructionError("novel referent '" + novel_referent.str() + "' occurs in the corpus");
    }
    const ReferentSet& known = exclude.referents(probe_word);
    auto qualifies = [&](const InputPair& p) {
        if (p.utterance.contains(probe_word)) return false;
        return std::none_of(known.begin(), known.end(), [&](const Referent& r) { return p.scene.contains(r); });
    };
    return build_trials(corpus, options, "probe word '" + probe_word.str() + "'", qualifies, probe_word,
                        novel_referent);
}

std::vector<InputPair> build_synonym_trials(const Corpus& corpus, const Word& novel_word,
                                            const Referent& target_referent,
                                            const GoldLexicon& gold,
                                            const ProbeOptions& options) {
    if (utterance_has(corpus, novel_word)) {
        throw ConstructionError("novel word '" + novel_word.str() + "' occurs in the corpus");
    }
    const std::size_t n = std::min(options.training_cutoff, corpus.pairs.size());
    if (!std::any_of(corpus.pairs.begin(), corpus.pairs.begin() + static_cast<std::ptrdiff_t>(n),
                     [&](const InputPair& p) { return p.scene.contains(target_referent); })) {
        throw ConstructionError("target referent '" + target_referent.str() +
                                "' does not occur in the training pairs");
    }
    const std::vector<Word> labels = gold.labels_of(target_referent);
    auto qualifies = [&](const InputPair& p) {
        if (p.scene.contains(target_referent)) return false;
        return std::none_of(labels.begin(), labels.end(), [&](const Word& w) { return p.utterance.contains(w); });
    };
    return build_trials(corpus, options, "target referent '" + target_referent.str() + "'", qualifies,
                        novel_word, target_referent);
}

std::vector<CountRange> default_probe_ranges() {
    return {{"<5", 0, 4}, {"5-20", 5, 20}, {">20", 21, std::numeric_limits<std::size_t>::max()}};
}

std::map<std::string, std::vector<Word>> select_probe_words(
    const std::map<Word, std::size_t>& counts, const GoldLexicon& gold,
    const std::vector<CountRange>& ranges, std::size_t per_range, std::uint64_t seed) {
    std::map<std::string, std::vector<Word>> out;
    Rng rng(seed);
    for (const auto& range : ranges) {
        std::vector<Word> pool;
        for (const auto& [w, c] : counts) {
            if (c > 0 && range.contains(c) && gold.contains(w)) pool.push_back(w);
        }
        if (pool.size() < per_range) {
            throw ConstructionError("frequency range '" + range.label + "' has " + std::to_string(pool.size()) +
                                    " candidate words, need " + std::to_string(per_range));
        }
        // Partial Fisher-Yates over the sorted pool.
        for (std::size_t i = 0; i < per_range; ++i) {
            const std::size_t j = i + rng.uniform_index(pool.size() - i);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(per_range);
        std::sort(pool.begin(), pool.end());
        out[range.label] = std::move(pool);
    }
    return out;
}

}  // namespace xsl
