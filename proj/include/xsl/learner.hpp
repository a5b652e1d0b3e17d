#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xsl/corpus.hpp"
#include "xsl/symbols.hpp"

namespace xsl {

// Association scores under the joint/joint model double on every co-occurrence,
// so they need the extended exponent range (x86-64: up to 2^16383).
using Real = long double;

// In-the-moment alignment: no competition, words compete for a referent, or
// referents compete for a word.
enum class Alignment { Joint, WordCompetition, ReferentCompetition };

// Meaning representation: raw association p(w,r) or p(r|w) over observed referents.
enum class Representation { Joint, ReferentConditional };

struct ModelConfig {
    Alignment alignment = Alignment::WordCompetition;
    Representation representation = Representation::ReferentConditional;
    double lambda = 0.01;   // smoothing mass per referent slot
    std::size_t beta = 100; // upper bound on the referent vocabulary

    void validate() const;

    // Short id used in files, e.g. "wc/cond".
    std::string id() const;
    // Notation used in plots, e.g. "a(w|r)p(r|w)".
    std::string label() const;
    // Row of the model table, 1..6.
    int table_row() const noexcept;

    static ModelConfig from_id(std::string_view id, double lambda, std::size_t beta);
    // All six models in table order.
    static std::array<ModelConfig, 6> all(double lambda, std::size_t beta);

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

std::string_view to_string(Alignment a) noexcept;
std::string_view to_string(Representation r) noexcept;

// Sparse non-negative word-referent scores with cached per-word row sums.
class AssocTable {
public:
    using Row = std::map<Referent, Real>;

    Real get(const Word& w, const Referent& r) const;
    Real row_sum(const Word& w) const;
    // Null when the word has no cells.
    const Row* row(const Word& w) const;

    // delta must be >= 0.
    void add(const Word& w, const Referent& r, Real delta);
    // Restores a stored row sum verbatim (checkpoint loading).
    void set_row_sum(const Word& w, Real sum);

    std::size_t cell_count() const noexcept { return cells_; }
    std::size_t row_count() const noexcept { return rows_.size(); }

    template <class F>
    void for_each_cell(F&& f) const {
        for (const auto& [w, data] : rows_) {
            for (const auto& [r, v] : data.cells) f(w, r, v);
        }
    }
    template <class F>
    void for_each_row(F&& f) const {
        for (const auto& [w, data] : rows_) f(w, data.cells, data.sum);
    }

    friend bool operator==(const AssocTable&, const AssocTable&) = default;

private:
    struct RowData {
        Row cells;
        Real sum = 0;
        friend bool operator==(const RowData&, const RowData&) = default;
    };
    std::map<Word, RowData> rows_;
    std::size_t cells_ = 0;
};

class LearnerState {
public:
    explicit LearnerState(ModelConfig config);
    // Rebuilds a state from stored parts; validates the registry invariants.
    LearnerState(ModelConfig config, AssocTable assoc, WordSet words, ReferentSet referents,
                 std::size_t step);

    const ModelConfig& config() const noexcept { return config_; }
    const AssocTable& assoc() const noexcept { return assoc_; }
    const WordSet& observed_words() const noexcept { return words_; }
    const ReferentSet& observed_referents() const noexcept { return referents_; }
    std::size_t step() const noexcept { return step_; }

    friend bool operator==(const LearnerState&, const LearnerState&) = default;

private:
    friend void update(LearnerState&, const InputPair&);

    ModelConfig config_;
    AssocTable assoc_;
    WordSet words_;
    ReferentSet referents_;
    std::size_t step_ = 0;
};

// Alignment strengths for one input pair, dense over utterance x scene.
struct AlignmentTable {
    std::vector<Word> words;
    std::vector<Referent> referents;
    std::vector<Real> cells;  // row-major: cells[i * referents.size() + j]

    Real at(std::size_t word_index, std::size_t referent_index) const {
        return cells[word_index * referents.size() + referent_index];
    }
    // Throws if (w, r) lies outside the pair.
    Real at(const Word& w, const Referent& r) const;
};

// Current meaning representation. Unseen symbols get the uniform default:
// 1/beta under p(r|w), lambda/beta under p(w,r).
Real theta(const LearnerState& state, const Word& w, const Referent& r);

// theta from an association score and its row sum, without table lookups.
Real theta_from_assoc(const ModelConfig& config, Real assoc, Real row_sum) noexcept;

// theta(w, r) for any referent r with no association to w.
Real theta_unseen(const LearnerState& state, const Word& w);

// Alignment of the pair under the state's current theta.
AlignmentTable align(const LearnerState& state, const InputPair& pair);

// Adds the pre-update alignment to every utterance x scene cell and extends
// the registries. Throws ConfigError (state untouched) if the scene would push
// the referent registry past beta.
void update(LearnerState& state, const InputPair& pair);

struct CheckpointSummary {
    std::size_t step = 0;
    std::size_t observed_words = 0;
    std::size_t observed_referents = 0;
    std::optional<double> payload;  // value returned by the checkpoint hook
};

using CheckpointHook = std::function<double(const LearnerState&)>;

// Folds update over the corpus in order. A checkpoint is taken every
// `checkpoint_every` pairs and after the final pair. Update errors are
// rethrown with the failing pair index.
std::vector<CheckpointSummary> train(LearnerState& state, const Corpus& corpus,
                                     std::size_t checkpoint_every,
                                     const CheckpointHook& hook = {});

// theta(w, r) for every observed referent.
std::map<Referent, Real> meaning_vector(const LearnerState& state, const Word& w);

// theta on a per-word probability scale. Under p(w,r) the raw score is
// divided by the total over all beta referent slots (observed cells plus
// unseen slots at lambda/beta), so a fresh word reports 1/beta under both
// representations.
Real meaning_probability(const LearnerState& state, const Word& w, const Referent& r);

// Referent with the largest theta among those associated with w; ties go to
// the lexicographically smallest. Empty when w has no associations.
std::optional<Referent> best_referent(const LearnerState& state, const Word& w);

// Versioned JSON checkpoint. Reals are written as hexadecimal floating point
// strings so they reload bit-exactly.
void save_state(std::ostream& out, const LearnerState& state);
LearnerState load_state(std::istream& in);
void save_state_file(const std::string& path, const LearnerState& state);
LearnerState load_state_file(const std::string& path);

}  // namespace xsl
