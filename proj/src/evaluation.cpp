#include "xsl/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "xsl/error.hpp"

namespace xsl {

double cosine_similarity(const std::map<std::string, double>& a,
                         const std::map<std::string, double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [k, v] : a) {
        na += v * v;
        auto it = b.find(k);
        if (it != b.end()) dot += v * it->second;
    }
    for (const auto& [k, v] : b) nb += v * v;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double comprehension_score(const LearnerState& state, const Word& w, const ReferentSet& gold) {
    if (gold.empty()) throw MissingEntryError("empty gold referent set for '" + w.str() + "'");
    const auto& observed = state.observed_referents();

    std::size_t unobserved_gold = 0;
    Real dot = 0;
    for (const auto& g : gold) {
        dot += theta(state, w, g);
        if (!observed.contains(g)) ++unobserved_gold;
    }
    const std::size_t slots = std::max<std::size_t>(state.config().beta, observed.size() + unobserved_gold);

    // Cells of the row all lie in the observed registry; every other slot sits
    // at the default value.
    Real norm2 = 0;
    std::size_t explicit_slots = 0;
    const Real row_sum = state.assoc().row_sum(w);
    if (const auto* row = state.assoc().row(w)) {
        for (const auto& [r, v] : *row) {
            const Real t = theta_from_assoc(state.config(), v, row_sum);
            norm2 += t * t;
            ++explicit_slots;
        }
    }
    const Real fallback = theta_unseen(state, w);
    norm2 += static_cast<Real>(slots - explicit_slots) * fallback * fallback;

    const Real score = dot / (std::sqrt(norm2) * std::sqrt(static_cast<Real>(gold.size())));
    return std::clamp(static_cast<double>(score), 0.0, 1.0);
}

double comprehension_score(const LearnerState& state, const Word& w, const GoldLexicon& gold) {
    return comprehension_score(state, w, gold.referents(w));
}

ComprehensionReport comprehension_report(const LearnerState& state, const GoldLexicon& gold) {
    ComprehensionReport rep;
    rep.step = state.step();
    rep.model = state.config().id();
    double total = 0.0;
    for (const auto& w : state.observed_words()) {
        if (!gold.contains(w)) continue;
        const double s = comprehension_score(state, w, gold);
        rep.per_word.emplace_hint(rep.per_word.end(), w, s);
        total += s;
    }
    if (rep.per_word.empty()) throw EvaluationError("no observed words with gold entries to evaluate");
    rep.average = total / static_cast<double>(rep.per_word.size());
    return rep;
}

double average_comprehension(const LearnerState& state, const GoldLexicon& gold) {
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& w : state.observed_words()) {
        if (!gold.contains(w)) continue;
        total += comprehension_score(state, w, gold);
        ++n;
    }
    if (n == 0) throw EvaluationError("no observed words with gold entries to evaluate");
    return total / static_cast<double>(n);
}

std::vector<FrequencyBand> FrequencyBands::default_bands() {
    return {{"low", 0, 4}, {"mid", 5, 10}, {"high", 11, std::nullopt}};
}

void FrequencyBands::validate() const {
    for (std::size_t i = 0; i < bands.size(); ++i) {
        const auto& a = bands[i];
        if (a.max_count && *a.max_count < a.min_count) {
            throw ConfigError("frequency band '" + a.label + "' has max < min");
        }
        for (std::size_t j = i + 1; j < bands.size(); ++j) {
            const auto& b = bands[j];
            const std::size_t lo = std::max(a.min_count, b.min_count);
            const bool overlap = (!a.max_count || lo <= *a.max_count) && (!b.max_count || lo <= *b.max_count);
            if (overlap) throw ConfigError("frequency bands '" + a.label + "' and '" + b.label + "' overlap");
            if (a.label == b.label) throw ConfigError("duplicate frequency band label '" + a.label + "'");
        }
    }
}

const FrequencyBand* FrequencyBands::band_of(std::size_t count) const {
    for (const auto& b : bands) {
        if (b.contains(count)) return &b;
    }
    return nullptr;
}

std::map<std::string, double> frequency_split_report(const LearnerState& state,
                                                     const GoldLexicon& gold,
                                                     const FrequencyBands& bands) {
    bands.validate();
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const auto& w : state.observed_words()) {
        if (!gold.contains(w)) continue;
        auto it = bands.counts.find(w);
        if (it == bands.counts.end()) {
            throw EvaluationError("no frequency count for observed word '" + w.str() + "'");
        }
        const auto* band = bands.band_of(it->second);
        if (!band) continue;
        auto& [sum, n] = acc[band->label];
        sum += comprehension_score(state, w, gold);
        ++n;
    }
    std::map<std::string, double> out;
    for (const auto& [label, sn] : acc) out[label] = sn.first / static_cast<double>(sn.second);
    return out;
}

CheckpointHook comprehension_hook(const GoldLexicon& gold) {
    return [&gold](const LearnerState& s) { return average_comprehension(s, gold); };
}

LearningCurve learning_curve(const std::vector<CheckpointSummary>& checkpoints,
                             const std::string& model, Provenance provenance) {
    LearningCurve curve;
    curve.model = model;
    curve.provenance = provenance;
    for (const auto& c : checkpoints) {
        if (!c.payload) throw EvaluationError("checkpoint at step " + std::to_string(c.step) + " has no payload");
        if (!curve.points.empty() && c.step <= curve.points.back().first) {
            throw EvaluationError("checkpoints are not in increasing step order");
        }
        curve.points.emplace_back(c.step, *c.payload);
    }
    return curve;
}

}  // namespace xsl
