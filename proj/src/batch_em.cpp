#include "xsl/batch_em.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "xsl/error.hpp"

namespace xsl {

BatchModel BatchModel::uniform(const WordSet& words, const ReferentSet& referents) {
    if (words.empty() || referents.empty()) throw EvaluationError("batch model needs non-empty vocabularies");
    const double p = 1.0 / static_cast<double>(referents.size());
    ExpectedCounts counts;
    for (const auto& w : words) {
        auto& row = counts[w];
        for (const auto& r : referents) row.emplace_hint(row.end(), r, p);
    }
    return batch_m_step(counts);
}

double BatchModel::probability(const Word& w, const Referent& r) const {
    auto it = rows_.find(w);
    if (it == rows_.end()) return 0.0;
    auto c = it->second.find(r);
    return c == it->second.end() ? 0.0 : c->second;
}

const std::map<Referent, double>& BatchModel::row(const Word& w) const {
    auto it = rows_.find(w);
    if (it == rows_.end()) throw MissingEntryError("word '" + w.str() + "' is not in the batch model");
    return it->second;
}

Referent BatchModel::argmax(const Word& w) const {
    const auto& r = row(w);
    auto best = r.begin();
    for (auto it = r.begin(); it != r.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

ExpectedCounts batch_e_step(const BatchModel& model, const Corpus& corpus) {
    ExpectedCounts counts;
    for (const auto& pair : corpus.pairs) {
        for (const auto& r : pair.scene) {
            double denom = 0.0;
            for (const auto& w : pair.utterance) denom += model.probability(w, r);
            if (!(denom > 0.0)) {
                throw EvaluationError("referent '" + r.str() + "' has no support in pair " +
                                      std::to_string(pair.index));
            }
            for (const auto& w : pair.utterance) counts[w][r] += model.probability(w, r) / denom;
        }
    }
    return counts;
}

BatchModel batch_m_step(const ExpectedCounts& counts) {
    BatchModel model;
    for (const auto& [w, cells] : counts) {
        double total = 0.0;
        for (const auto& [r, c] : cells) total += c;
        if (!(total > 0.0)) throw EvaluationError("word '" + w.str() + "' has zero expected count");
        auto& row = model.rows_[w];
        for (const auto& [r, c] : cells) {
            if (c > 0.0) row.emplace_hint(row.end(), r, c / total);
        }
    }
    return model;
}

double batch_log_likelihood(const BatchModel& model, const Corpus& corpus) {
    double ll = 0.0;
    for (const auto& pair : corpus.pairs) {
        for (const auto& r : pair.scene) {
            double s = 0.0;
            for (const auto& w : pair.utterance) s += model.probability(w, r);
            ll += std::log(s);
        }
    }
    return ll;
}

BatchRun batch_em(const Corpus& corpus, std::size_t iterations) {
    if (iterations == 0) throw ConfigError("batch EM needs at least one iteration");
    WordSet words;
    ReferentSet referents;
    for (const auto& p : corpus.pairs) {
        words.insert(p.utterance.begin(), p.utterance.end());
        referents.insert(p.scene.begin(), p.scene.end());
    }
    BatchRun run;
    run.model = BatchModel::uniform(words, referents);
    run.log_likelihood.push_back(batch_log_likelihood(run.model, corpus));
    for (std::size_t i = 0; i < iterations; ++i) {
        run.model = batch_m_step(batch_e_step(run.model, corpus));
        run.log_likelihood.push_back(batch_log_likelihood(run.model, corpus));
    }
    return run;
}

void write_batch_csv(std::ostream& out, const BatchModel& model) {
    out << "word,referent,probability\n";
    char buf[64];
    for (const auto& [w, row] : model.rows()) {
        for (const auto& [r, p] : row) {
            std::snprintf(buf, sizeof buf, "%.17g", p);
            out << w.str() << ',' << r.str() << ',' << buf << '\n';
        }
    }
}

}  // namespace xsl
