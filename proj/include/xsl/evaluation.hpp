#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xsl/corpus.hpp"
#include "xsl/learner.hpp"

namespace xsl {

// Cosine of two non-negative sparse vectors; absent keys are zero.
// Returns 0 when either vector is zero.
double cosine_similarity(const std::map<std::string, double>& a,
                         const std::map<std::string, double>& b);

// Cosine between the learned meaning of w and its gold indicator vector.
//
// The learned vector lives in the beta referent slots of the model: every
// observed referent, every gold referent, and as many unseen slots as needed
// to reach beta. Slots without evidence hold the uniform default, so a fresh
// learner scores 1/sqrt(beta) against a single gold referent.
// Throws MissingEntryError when w has no gold entry.
double comprehension_score(const LearnerState& state, const Word& w, const GoldLexicon& gold);

// Same, against an explicit gold referent set (used by probe reports).
double comprehension_score(const LearnerState& state, const Word& w, const ReferentSet& gold);

struct ComprehensionReport {
    std::map<Word, double> per_word;
    double average = 0.0;
    std::size_t step = 0;
    std::string model;
};

// Scores every observed word that has a gold entry.
ComprehensionReport comprehension_report(const LearnerState& state, const GoldLexicon& gold);

// Unweighted mean over observed word types with gold entries.
// Throws EvaluationError when there are none.
double average_comprehension(const LearnerState& state, const GoldLexicon& gold);

struct FrequencyBand {
    std::string label;
    std::size_t min_count = 0;                 // inclusive
    std::optional<std::size_t> max_count;      // inclusive; open-ended when empty

    bool contains(std::size_t count) const noexcept {
        return count >= min_count && (!max_count || count <= *max_count);
    }
};

struct FrequencyBands {
    std::vector<FrequencyBand> bands;
    std::map<Word, std::size_t> counts;  // token occurrences in the training corpus

    // low: < 5, mid: 5-10, high: > 10.
    static std::vector<FrequencyBand> default_bands();
    // Throws ConfigError if two bands overlap.
    void validate() const;
    // Label of the band containing the count, or null.
    const FrequencyBand* band_of(std::size_t count) const;
};

// Per-band mean comprehension over observed gold words; empty bands are absent.
std::map<std::string, double> frequency_split_report(const LearnerState& state,
                                                     const GoldLexicon& gold,
                                                     const FrequencyBands& bands);

struct LearningCurve {
    std::vector<std::pair<std::size_t, double>> points;  // (step, average comprehension)
    std::string model;
    Provenance provenance = Provenance::Base;
};

// Checkpoint hook computing average comprehension against `gold`.
CheckpointHook comprehension_hook(const GoldLexicon& gold);

// One point per checkpoint; every checkpoint must carry a payload.
LearningCurve learning_curve(const std::vector<CheckpointSummary>& checkpoints,
                             const std::string& model, Provenance provenance);

}  // namespace xsl
