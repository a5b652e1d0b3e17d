#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "xsl/corpus.hpp"

namespace xsl {

// Expected word-referent co-occurrence counts from one E-step.
using ExpectedCounts = std::map<Word, std::map<Referent, double>>;

// Batch estimate of p(r|w) over the corpus vocabularies. Every row is a
// probability distribution; cells absent from a row are zero.
class BatchModel {
public:
    BatchModel() = default;

    // 1/|referents| for every word-referent pair of the cross product.
    static BatchModel uniform(const WordSet& words, const ReferentSet& referents);

    double probability(const Word& w, const Referent& r) const;
    const std::map<Referent, double>& row(const Word& w) const;
    const std::map<Word, std::map<Referent, double>>& rows() const noexcept { return rows_; }

    // Most probable referent; ties go to the lexicographically smallest.
    Referent argmax(const Word& w) const;

private:
    friend BatchModel batch_m_step(const ExpectedCounts& counts);
    std::map<Word, std::map<Referent, double>> rows_;
};

// For every pair and every scene referent, spreads one unit of expected count
// over the utterance in proportion to p(r|w).
ExpectedCounts batch_e_step(const BatchModel& model, const Corpus& corpus);

// Row-normalizes the counts. Throws EvaluationError for a word with zero mass.
BatchModel batch_m_step(const ExpectedCounts& counts);

// Sum over pairs and scene referents of log(sum_{w in u} p(r|w)). The 1/|u|
// factor is constant across iterations and left out.
double batch_log_likelihood(const BatchModel& model, const Corpus& corpus);

struct BatchRun {
    BatchModel model;
    std::vector<double> log_likelihood;  // [0] is the uniform start, then one per iteration
};

// EM from the uniform model. iterations must be >= 1.
BatchRun batch_em(const Corpus& corpus, std::size_t iterations);

// "word,referent,probability" rows in lexicographic order.
void write_batch_csv(std::ostream& out, const BatchModel& model);

}  // namespace xsl
