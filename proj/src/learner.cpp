#include "xsl/learner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "xsl/error.hpp"

namespace xsl {

namespace {

constexpr std::string_view kStateFormat = "xsl-lab/learner-state";
constexpr int kStateVersion = 1;

std::string hex_real(Real v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
    return std::string(buf, res.ptr);
}

Real parse_hex_real(const std::string& s) {
    Real v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::hex);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ParseError("invalid hexadecimal real '" + s + "'");
    }
    return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// ModelConfig

void ModelConfig::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ConfigError("smoothing lambda must be a finite positive number");
    }
    if (beta == 0) throw ConfigError("referent bound beta must be >= 1");
}

std::string_view to_string(Alignment a) noexcept {
    switch (a) {
        case Alignment::Joint: return "joint";
        case Alignment::WordCompetition: return "wc";
        case Alignment::ReferentCompetition: return "rc";
    }
    return "joint";
}

std::string_view to_string(Representation r) noexcept {
    return r == Representation::Joint ? "joint" : "cond";
}

std::string ModelConfig::id() const {
    return std::string(to_string(alignment)) + "/" + std::string(to_string(representation));
}

std::string ModelConfig::label() const {
    std::string a = alignment == Alignment::Joint             ? "a(w,r)"
                    : alignment == Alignment::WordCompetition ? "a(w|r)"
                                                              : "a(r|w)";
    std::string p = representation == Representation::Joint ? "p(w,r)" : "p(r|w)";
    return a + p;
}

int ModelConfig::table_row() const noexcept {
    const int a = alignment == Alignment::Joint ? 1 : alignment == Alignment::WordCompetition ? 2 : 3;
    return representation == Representation::Joint ? a : a + 3;
}

ModelConfig ModelConfig::from_id(std::string_view id, double lambda, std::size_t beta) {
    for (const auto& m : all(lambda, beta)) {
        if (m.id() == id || m.label() == id) return m;
    }
    throw ConfigError("unknown model '" + std::string(id) +
                      "' (expected one of joint/joint, wc/joint, rc/joint, joint/cond, wc/cond, rc/cond)");
}

std::array<ModelConfig, 6> ModelConfig::all(double lambda, std::size_t beta) {
    std::array<ModelConfig, 6> out{};
    const Alignment aligns[] = {Alignment::Joint, Alignment::WordCompetition,
                                Alignment::ReferentCompetition};
    std::size_t i = 0;
    for (auto rep : {Representation::Joint, Representation::ReferentConditional}) {
        for (auto a : aligns) out[i++] = ModelConfig{a, rep, lambda, beta};
    }
    return out;
}

// ---------------------------------------------------------------------------
// AssocTable

Real AssocTable::get(const Word& w, const Referent& r) const {
    auto it = rows_.find(w);
    if (it == rows_.end()) return 0;
    auto c = it->second.cells.find(r);
    return c == it->second.cells.end() ? Real{0} : c->second;
}

Real AssocTable::row_sum(const Word& w) const {
    auto it = rows_.find(w);
    return it == rows_.end() ? Real{0} : it->second.sum;
}

const AssocTable::Row* AssocTable::row(const Word& w) const {
    auto it = rows_.find(w);
    return it == rows_.end() ? nullptr : &it->second.cells;
}

void AssocTable::add(const Word& w, const Referent& r, Real delta) {
    if (!(delta >= 0)) throw Error("association increments must be non-negative");
    auto& data = rows_[w];
    auto [it, inserted] = data.cells.try_emplace(r, Real{0});
    if (inserted) ++cells_;
    it->second += delta;
    data.sum += delta;
}

void AssocTable::set_row_sum(const Word& w, Real sum) {
    auto it = rows_.find(w);
    if (it == rows_.end()) throw Error("row sum for word without cells: '" + w.str() + "'");
    it->second.sum = sum;
}

// ---------------------------------------------------------------------------
// LearnerState

LearnerState::LearnerState(ModelConfig config) : config_(config) { config_.validate(); }

LearnerState::LearnerState(ModelConfig config, AssocTable assoc, WordSet words,
                           ReferentSet referents, std::size_t step)
    : config_(config),
      assoc_(std::move(assoc)),
      words_(std::move(words)),
      referents_(std::move(referents)),
      step_(step) {
    config_.validate();
    if (referents_.size() > config_.beta) {
        throw ConfigError("state has " + std::to_string(referents_.size()) +
                          " observed referents, more than beta = " + std::to_string(config_.beta));
    }
    assoc_.for_each_cell([&](const Word& w, const Referent& r, Real v) {
        if (!words_.contains(w) || !referents_.contains(r)) {
            throw Error("assoc cell (" + w.str() + ", " + r.str() + ") outside the registries");
        }
        if (!(v >= 0)) throw Error("negative assoc cell");
    });
}

// ---------------------------------------------------------------------------
// Learning

Real theta_from_assoc(const ModelConfig& config, Real assoc, Real row_sum) noexcept {
    const Real lambda = config.lambda;
    const Real beta = static_cast<Real>(config.beta);
    if (config.representation == Representation::Joint) return assoc + lambda / beta;
    return (assoc + lambda) / (row_sum + beta * lambda);
}

Real theta(const LearnerState& state, const Word& w, const Referent& r) {
    const auto& cfg = state.config();
    const Real a = state.assoc().get(w, r);
    const Real row = cfg.representation == Representation::Joint ? Real{0} : state.assoc().row_sum(w);
    return theta_from_assoc(cfg, a, row);
}

Real theta_unseen(const LearnerState& state, const Word& w) {
    return theta_from_assoc(state.config(), 0, state.assoc().row_sum(w));
}

Real AlignmentTable::at(const Word& w, const Referent& r) const {
    auto wi = std::lower_bound(words.begin(), words.end(), w);
    auto ri = std::lower_bound(referents.begin(), referents.end(), r);
    if (wi == words.end() || *wi != w || ri == referents.end() || *ri != r) {
        throw Error("alignment lookup outside the input pair");
    }
    return at(static_cast<std::size_t>(wi - words.begin()),
              static_cast<std::size_t>(ri - referents.begin()));
}

AlignmentTable align(const LearnerState& state, const InputPair& pair) {
    if (pair.utterance.empty() || pair.scene.empty()) {
        throw Error("cannot align an input pair with an empty utterance or scene");
    }
    AlignmentTable t;
    t.words.assign(pair.utterance.begin(), pair.utterance.end());
    t.referents.assign(pair.scene.begin(), pair.scene.end());
    const std::size_t nw = t.words.size();
    const std::size_t nr = t.referents.size();
    t.cells.resize(nw * nr);
    for (std::size_t i = 0; i < nw; ++i) {
        for (std::size_t j = 0; j < nr; ++j) t.cells[i * nr + j] = theta(state, t.words[i], t.referents[j]);
    }

    switch (state.config().alignment) {
        case Alignment::Joint:
            break;
        case Alignment::WordCompetition:
            for (std::size_t j = 0; j < nr; ++j) {
                Real total = 0;
                for (std::size_t i = 0; i < nw; ++i) total += t.cells[i * nr + j];
                for (std::size_t i = 0; i < nw; ++i) t.cells[i * nr + j] /= total;
            }
            break;
        case Alignment::ReferentCompetition:
            for (std::size_t i = 0; i < nw; ++i) {
                Real total = 0;
                for (std::size_t j = 0; j < nr; ++j) total += t.cells[i * nr + j];
                for (std::size_t j = 0; j < nr; ++j) t.cells[i * nr + j] /= total;
            }
            break;
    }
    return t;
}

void update(LearnerState& state, const InputPair& pair) {
    std::size_t fresh = 0;
    for (const auto& r : pair.scene) fresh += state.referents_.contains(r) ? 0 : 1;
    if (state.referents_.size() + fresh > state.config_.beta) {
        throw ConfigError("observed referents would reach " +
                          std::to_string(state.referents_.size() + fresh) + ", exceeding beta = " +
                          std::to_string(state.config_.beta) + "; configure a larger beta");
    }

    const AlignmentTable t = align(state, pair);
    const std::size_t nr = t.referents.size();
    for (std::size_t i = 0; i < t.words.size(); ++i) {
        const Real row = state.assoc_.row_sum(t.words[i]);
        Real added = 0;
        for (std::size_t j = 0; j < nr; ++j) added += t.cells[i * nr + j];
        if (!std::isfinite(row + added)) {
            throw Error("association score overflow for word '" + t.words[i].str() + "'");
        }
    }
    for (std::size_t i = 0; i < t.words.size(); ++i) {
        for (std::size_t j = 0; j < nr; ++j) state.assoc_.add(t.words[i], t.referents[j], t.cells[i * nr + j]);
    }
    state.words_.insert(pair.utterance.begin(), pair.utterance.end());
    state.referents_.insert(pair.scene.begin(), pair.scene.end());
    ++state.step_;
}

std::vector<CheckpointSummary> train(LearnerState& state, const Corpus& corpus,
                                     std::size_t checkpoint_every, const CheckpointHook& hook) {
    if (checkpoint_every == 0) throw ConfigError("checkpoint_every must be >= 1");
    std::vector<CheckpointSummary> out;
    auto checkpoint = [&] {
        CheckpointSummary s{state.step(), state.observed_words().size(),
                            state.observed_referents().size(), std::nullopt};
        if (hook) s.payload = hook(state);
        out.push_back(s);
    };
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        try {
            update(state, corpus.pairs[i]);
        } catch (const ConfigError& e) {
            throw ConfigError("input pair " + std::to_string(corpus.pairs[i].index) + ": " + e.what());
        } catch (const Error& e) {
            throw Error("input pair " + std::to_string(corpus.pairs[i].index) + ": " + e.what());
        }
        if ((i + 1) % checkpoint_every == 0 || i + 1 == corpus.size()) checkpoint();
    }
    return out;
}

std::map<Referent, Real> meaning_vector(const LearnerState& state, const Word& w) {
    std::map<Referent, Real> out;
    for (const auto& r : state.observed_referents()) out.emplace_hint(out.end(), r, theta(state, w, r));
    return out;
}

Real meaning_probability(const LearnerState& state, const Word& w, const Referent& r) {
    const auto& cfg = state.config();
    if (cfg.representation == Representation::ReferentConditional) return theta(state, w, r);
    const Real lambda = cfg.lambda;
    return theta(state, w, r) / (state.assoc().row_sum(w) + lambda);
}

std::optional<Referent> best_referent(const LearnerState& state, const Word& w) {
    const auto* row = state.assoc().row(w);
    if (!row || row->empty()) return std::nullopt;
    // theta is increasing in assoc within a row under both representations.
    auto best = row->begin();
    for (auto it = row->begin(); it != row->end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

// ---------------------------------------------------------------------------
// Checkpoint I/O

void save_state(std::ostream& out, const LearnerState& state) {
    const auto& cfg = state.config();
    nlohmann::ordered_json j;
    j["format"] = kStateFormat;
    j["version"] = kStateVersion;
    j["config"] = {{"alignment", to_string(cfg.alignment)},
                   {"representation", to_string(cfg.representation)},
                   {"lambda", cfg.lambda},
                   {"beta", cfg.beta}};
    j["step"] = state.step();
    auto words = nlohmann::ordered_json::array();
    for (const auto& w : state.observed_words()) words.push_back(w.str());
    auto refs = nlohmann::ordered_json::array();
    for (const auto& r : state.observed_referents()) refs.push_back(r.str());
    j["words"] = std::move(words);
    j["referents"] = std::move(refs);
    auto cells = nlohmann::ordered_json::array();
    auto sums = nlohmann::ordered_json::array();
    state.assoc().for_each_row([&](const Word& w, const AssocTable::Row& row, Real sum) {
        for (const auto& [r, v] : row) cells.push_back({w.str(), r.str(), hex_real(v)});
        sums.push_back({w.str(), hex_real(sum)});
    });
    j["assoc"] = std::move(cells);
    j["row_sums"] = std::move(sums);
    out << j.dump(1) << '\n';
}

LearnerState load_state(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("learner state: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kStateFormat) throw ParseError("not a learner state document");
        if (j.at("version").get<int>() != kStateVersion) {
            throw ParseError("unsupported learner state version " + j.at("version").dump());
        }
        const auto& c = j.at("config");
        ModelConfig cfg;
        const auto a = c.at("alignment").get<std::string>();
        const auto r = c.at("representation").get<std::string>();
        cfg = ModelConfig::from_id(a + "/" + r, c.at("lambda").get<double>(), c.at("beta").get<std::size_t>());

        WordSet words;
        for (const auto& w : j.at("words")) words.insert(Word(w.get<std::string>()));
        ReferentSet refs;
        for (const auto& x : j.at("referents")) refs.insert(Referent(x.get<std::string>()));
        AssocTable assoc;
        for (const auto& cell : j.at("assoc")) {
            assoc.add(Word(cell.at(0).get<std::string>()), Referent(cell.at(1).get<std::string>()),
                      parse_hex_real(cell.at(2).get<std::string>()));
        }
        for (const auto& s : j.at("row_sums")) {
            assoc.set_row_sum(Word(s.at(0).get<std::string>()), parse_hex_real(s.at(1).get<std::string>()));
        }
        return LearnerState(cfg, std::move(assoc), std::move(words), std::move(refs),
                            j.at("step").get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("learner state: ") + e.what());
    }
}

void save_state_file(const std::string& path, const LearnerState& state) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write learner state '" + path + "'");
    save_state(out, state);
}

LearnerState load_state_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open learner state '" + path + "'");
    return load_state(in);
}

}  // namespace xsl
