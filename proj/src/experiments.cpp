#include "xsl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "xsl/batch_em.hpp"
#include "xsl/error.hpp"
#include "xsl/plot.hpp"
#include "xsl/random.hpp"

namespace xsl {

namespace {

using json = nlohmann::json;

// Runs f(0..n-1) on up to `jobs` threads. Results must be written by index so
// the output never depends on scheduling. The first exception is rethrown.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
            }
        }
    };
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Config JSON

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

template <class T>
void read(const json& j, std::string_view key, T& out, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->template get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
    }
}

void read_count(const json& j, std::string_view key, std::size_t& out, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_number_unsigned()) {
        throw ConfigError("'" + std::string(key) + "' in " + where + " must be a non-negative integer");
    }
    out = it->get<std::size_t>();
}

std::string_view format_name(CorpusFormat f) { return f == CorpusFormat::Jsonl ? "jsonl" : "pairs-text"; }

json ranges_to_json(const std::vector<CountRange>& ranges) {
    json a = json::array();
    for (const auto& r : ranges) {
        json o = {{"label", r.label}, {"min", r.min_count}};
        if (r.max_count != std::numeric_limits<std::size_t>::max()) o["max"] = r.max_count;
        a.push_back(o);
    }
    return a;
}

std::vector<CountRange> ranges_from_json(const json& a, const std::string& where) {
    if (!a.is_array()) throw ConfigError(where + " must be an array");
    std::vector<CountRange> out;
    for (const auto& o : a) {
        check_keys(o, {"label", "min", "max"}, where);
        CountRange r;
        r.max_count = std::numeric_limits<std::size_t>::max();
        read(o, "label", r.label, where);
        read_count(o, "min", r.min_count, where);
        read_count(o, "max", r.max_count, where);
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Training helpers

LearnerState train_prefix(const ModelConfig& model, const Corpus& corpus, std::size_t n) {
    LearnerState state(model);
    const Corpus prefix = corpus.slice(0, std::min(n, corpus.size()));
    train(state, prefix, prefix.size());
    return state;
}

CurveRecord train_curve(const ModelConfig& model, const Corpus& corpus, const GoldLexicon& gold,
                        std::size_t checkpoint_every, std::uint64_t seed) {
    LearnerState state(model);
    const auto checkpoints = train(state, corpus, checkpoint_every, comprehension_hook(gold));
    const auto curve = learning_curve(checkpoints, model.id(), corpus.provenance);
    return {curve.model, curve.provenance, seed, curve.points};
}

std::vector<SeedCorpora> prepare_all(const ExperimentConfig& config) {
    std::vector<SeedCorpora> out(config.seeds.size());
    parallel_for(out.size(), config.jobs, [&](std::size_t i) { out[i] = prepare_corpora(config, config.seeds[i]); });
    return out;
}

std::string seed_text(std::uint64_t s) { return std::to_string(s); }

const Provenance kProvenances[] = {Provenance::Base, Provenance::RuPlus, Provenance::LuPlus};

}  // namespace

// ---------------------------------------------------------------------------
// ExperimentConfig

ExperimentConfig::ExperimentConfig() {
    for (const auto& m : ModelConfig::all(lambda, beta)) models.push_back(m.id());
}

void ExperimentConfig::validate() const {
    if (schema_version != kConfigSchemaVersion) {
        throw ConfigError("unsupported config schema_version " + std::to_string(schema_version) + " (expected " +
                          std::to_string(kConfigSchemaVersion) + ")");
    }
    if (models.empty()) throw ConfigError("config lists no models");
    if (seeds.empty()) throw ConfigError("config lists no seeds");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ConfigError("config seeds must be distinct");
    }
    if (checkpoint_every == 0) throw ConfigError("checkpoint_every must be >= 1");
    std::set<std::string> seen;
    for (const auto& m : model_configs()) {
        m.validate();
        if (!seen.insert(m.id()).second) throw ConfigError("model '" + m.id() + "' listed twice");
    }
    if (!source.corpus_path) {
        source.synthetic.validate();
        if (source.synthetic.word_vocab >= beta) {
            throw ConfigError("beta (" + std::to_string(beta) + ") must exceed the synthetic vocabulary (" +
                              std::to_string(source.synthetic.word_vocab) + ")");
        }
    } else if (!source.lexicon_path) {
        throw ConfigError("a corpus file needs a gold lexicon file");
    }
    FrequencyBands{bands, {}}.validate();
    if (homonym.training_cutoff == 0) throw ConfigError("homonym training_cutoff must be >= 1");
    if (homonym.n_trials == 0) throw ConfigError("homonym n_trials must be >= 1");
    if (homonym.words_per_band == 0) throw ConfigError("homonym words_per_band must be >= 1");
    if (homonym.ranges.empty()) throw ConfigError("homonym ranges are empty");
    for (const auto& [label, words] : homonym.probe_words) {
        const bool known = std::any_of(homonym.ranges.begin(), homonym.ranges.end(),
                                       [&](const CountRange& r) { return r.label == label; });
        if (!known) throw ConfigError("probe words given for unknown range '" + label + "'");
        if (words.empty()) throw ConfigError("empty probe word list for range '" + label + "'");
    }
    if (synonym.simulations == 0) throw ConfigError("synonym simulations must be >= 1");
    if (synonym.training_cutoff == 0) throw ConfigError("synonym training_cutoff must be >= 1");
    if (synonym.n_trials == 0) throw ConfigError("synonym n_trials must be >= 1");
    if (oracle.n_pairs == 0 || oracle.n_pairs > OracleConfig::kMaxPairs) {
        throw ConfigError("oracle n_pairs must be in 1.." + std::to_string(OracleConfig::kMaxPairs));
    }
    if (oracle.iterations == 0) throw ConfigError("oracle iterations must be >= 1");
    CorpusSpec ospec{oracle.n_pairs, oracle.word_vocab, oracle.min_len, oracle.max_len, oracle.zipf_exponent, 1};
    ospec.validate();
    // Probe symbols are checked here so that bad names fail before training.
    (void)novel_referent(homonym.novel_referent);
    (void)novel_word(synonym.novel_word);
}

std::vector<ModelConfig> ExperimentConfig::model_configs() const {
    std::vector<ModelConfig> out;
    for (const auto& id : models) out.push_back(ModelConfig::from_id(id, lambda, beta));
    return out;
}

json ExperimentConfig::to_json() const {
    json j;
    j["schema_version"] = schema_version;
    json corpus;
    if (source.corpus_path) {
        corpus["path"] = *source.corpus_path;
        corpus["format"] = format_name(source.format);
        if (source.lexicon_path) corpus["lexicon"] = *source.lexicon_path;
    } else {
        const auto& s = source.synthetic;
        corpus["synthetic"] = {{"n_pairs", s.n_pairs},       {"word_vocab", s.word_vocab},
                               {"min_len", s.min_len},       {"max_len", s.max_len},
                               {"zipf_exponent", s.zipf_exponent}};
    }
    j["corpus"] = corpus;
    j["models"] = models;
    j["seeds"] = seeds;
    j["checkpoint_every"] = checkpoint_every;
    j["smoothing"] = {{"lambda", lambda}, {"beta", beta}};
    json bands_json = json::array();
    for (const auto& b : bands) {
        json o = {{"label", b.label}, {"min", b.min_count}};
        if (b.max_count) o["max"] = *b.max_count;
        bands_json.push_back(o);
    }
    j["bands"] = bands_json;
    j["homonym"] = {{"training_cutoff", homonym.training_cutoff},
                    {"n_trials", homonym.n_trials},
                    {"words_per_band", homonym.words_per_band},
                    {"ranges", ranges_to_json(homonym.ranges)},
                    {"probe_words", homonym.probe_words},
                    {"novel_referent", homonym.novel_referent}};
    j["synonym"] = {{"simulations", synonym.simulations},
                    {"training_cutoff", synonym.training_cutoff},
                    {"n_trials", synonym.n_trials},
                    {"min_count", synonym.min_count},
                    {"novel_word", synonym.novel_word}};
    j["oracle"] = {{"n_pairs", oracle.n_pairs},         {"iterations", oracle.iterations},
                   {"word_vocab", oracle.word_vocab},   {"min_len", oracle.min_len},
                   {"max_len", oracle.max_len},         {"zipf_exponent", oracle.zipf_exponent},
                   {"min_occurrences", oracle.min_occurrences}};
    j["thresholds"] = {{"high_band_min", thresholds.high_band_min},
                       {"low_band_gap", thresholds.low_band_gap},
                       {"first_meaning_tolerance", thresholds.first_meaning_tolerance},
                       {"max_non_increases", thresholds.max_non_increases},
                       {"ru_ordering_min_fraction", thresholds.ru_ordering_min_fraction},
                       {"oracle_agreement", thresholds.oracle_agreement}};
    j["jobs"] = jobs;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    ExperimentConfig c;
    check_keys(j, {"schema_version", "corpus", "models", "seeds", "checkpoint_every", "smoothing", "bands", "homonym",
                   "synonym", "oracle", "thresholds", "jobs"},
               "config");
    if (!j.contains("schema_version")) throw ConfigError("config is missing schema_version");
    read(j, "schema_version", c.schema_version, "config");
    if (auto it = j.find("corpus"); it != j.end()) {
        check_keys(*it, {"synthetic", "path", "format", "lexicon"}, "corpus");
        if (it->contains("synthetic") && it->contains("path")) {
            throw ConfigError("corpus takes either 'synthetic' or 'path', not both");
        }
        if (auto s = it->find("synthetic"); s != it->end()) {
            check_keys(*s, {"n_pairs", "word_vocab", "min_len", "max_len", "zipf_exponent"}, "corpus.synthetic");
            auto& spec = c.source.synthetic;
            read_count(*s, "n_pairs", spec.n_pairs, "corpus.synthetic");
            read_count(*s, "word_vocab", spec.word_vocab, "corpus.synthetic");
            read_count(*s, "min_len", spec.min_len, "corpus.synthetic");
            read_count(*s, "max_len", spec.max_len, "corpus.synthetic");
            read(*s, "zipf_exponent", spec.zipf_exponent, "corpus.synthetic");
        }
        if (it->contains("path")) {
            std::string path, lexicon, format = "pairs-text";
            read(*it, "path", path, "corpus");
            read(*it, "lexicon", lexicon, "corpus");
            read(*it, "format", format, "corpus");
            c.source.corpus_path = path;
            if (!lexicon.empty()) c.source.lexicon_path = lexicon;
            try {
                c.source.format = corpus_format_from_string(format);
            } catch (const Error& e) {
                throw ConfigError(e.what());
            }
        }
    }
    read(j, "models", c.models, "config");
    read(j, "seeds", c.seeds, "config");
    read_count(j, "checkpoint_every", c.checkpoint_every, "config");
    if (auto it = j.find("smoothing"); it != j.end()) {
        check_keys(*it, {"lambda", "beta"}, "smoothing");
        read(*it, "lambda", c.lambda, "smoothing");
        read_count(*it, "beta", c.beta, "smoothing");
    }
    if (auto it = j.find("bands"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("bands must be an array");
        c.bands.clear();
        for (const auto& o : *it) {
            check_keys(o, {"label", "min", "max"}, "bands");
            FrequencyBand b;
            read(o, "label", b.label, "bands");
            read_count(o, "min", b.min_count, "bands");
            if (o.contains("max")) {
                std::size_t mx = 0;
                read_count(o, "max", mx, "bands");
                b.max_count = mx;
            }
            c.bands.push_back(b);
        }
    }
    if (auto it = j.find("homonym"); it != j.end()) {
        check_keys(*it, {"training_cutoff", "n_trials", "words_per_band", "ranges", "probe_words", "novel_referent"},
                   "homonym");
        read_count(*it, "training_cutoff", c.homonym.training_cutoff, "homonym");
        read_count(*it, "n_trials", c.homonym.n_trials, "homonym");
        read_count(*it, "words_per_band", c.homonym.words_per_band, "homonym");
        if (it->contains("ranges")) c.homonym.ranges = ranges_from_json(it->at("ranges"), "homonym.ranges");
        read(*it, "probe_words", c.homonym.probe_words, "homonym");
        read(*it, "novel_referent", c.homonym.novel_referent, "homonym");
    }
    if (auto it = j.find("synonym"); it != j.end()) {
        check_keys(*it, {"simulations", "training_cutoff", "n_trials", "min_count", "novel_word"}, "synonym");
        read_count(*it, "simulations", c.synonym.simulations, "synonym");
        read_count(*it, "training_cutoff", c.synonym.training_cutoff, "synonym");
        read_count(*it, "n_trials", c.synonym.n_trials, "synonym");
        read_count(*it, "min_count", c.synonym.min_count, "synonym");
        read(*it, "novel_word", c.synonym.novel_word, "synonym");
    }
    if (auto it = j.find("oracle"); it != j.end()) {
        check_keys(*it, {"n_pairs", "iterations", "word_vocab", "min_len", "max_len", "zipf_exponent",
                         "min_occurrences"},
                   "oracle");
        read_count(*it, "n_pairs", c.oracle.n_pairs, "oracle");
        read_count(*it, "iterations", c.oracle.iterations, "oracle");
        read_count(*it, "word_vocab", c.oracle.word_vocab, "oracle");
        read_count(*it, "min_len", c.oracle.min_len, "oracle");
        read_count(*it, "max_len", c.oracle.max_len, "oracle");
        read(*it, "zipf_exponent", c.oracle.zipf_exponent, "oracle");
        read_count(*it, "min_occurrences", c.oracle.min_occurrences, "oracle");
    }
    if (auto it = j.find("thresholds"); it != j.end()) {
        check_keys(*it, {"high_band_min", "low_band_gap", "first_meaning_tolerance", "max_non_increases",
                         "ru_ordering_min_fraction", "oracle_agreement"},
                   "thresholds");
        read(*it, "high_band_min", c.thresholds.high_band_min, "thresholds");
        read(*it, "low_band_gap", c.thresholds.low_band_gap, "thresholds");
        read(*it, "first_meaning_tolerance", c.thresholds.first_meaning_tolerance, "thresholds");
        read_count(*it, "max_non_increases", c.thresholds.max_non_increases, "thresholds");
        read(*it, "ru_ordering_min_fraction", c.thresholds.ru_ordering_min_fraction, "thresholds");
        read(*it, "oracle_agreement", c.thresholds.oracle_agreement, "thresholds");
    }
    read(j, "jobs", c.jobs, "config");
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return from_json(j);
}

std::uint64_t fnv1a(std::string_view data) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t ExperimentConfig::hash() const {
    json j = to_json();
    j.erase("jobs");
    return fnv1a(j.dump());
}

// ---------------------------------------------------------------------------
// Corpora

const Corpus& SeedCorpora::by_provenance(Provenance p) const {
    switch (p) {
        case Provenance::Base: return base;
        case Provenance::RuPlus: return ru_plus;
        case Provenance::LuPlus: return lu_plus;
        default: throw ConfigError("no corpus for provenance '" + std::string(to_string(p)) + "'");
    }
}

SeedCorpora prepare_corpora(const ExperimentConfig& config, std::uint64_t seed) {
    SeedCorpora c;
    c.seed = seed;
    if (config.source.corpus_path) {
        c.source = load_corpus_file(*config.source.corpus_path, config.source.format);
        c.gold = load_lexicon_file(*config.source.lexicon_path);
    } else {
        CorpusSpec spec = config.source.synthetic;
        spec.seed = seed;
        auto generated = generate_synthetic_corpus(spec);
        c.source = std::move(generated.first);
        c.gold = std::move(generated.second);
    }
    c.base = subsample_every_third(c.source);
    c.ru_plus = make_ru_plus(c.source);
    c.lu_plus = make_lu_plus(c.source);
    return c;
}

// ---------------------------------------------------------------------------
// Tables

Table curve_table(const std::vector<CurveRecord>& curves) {
    Table t({{"model", false}, {"corpus", false}, {"seed", true}, {"step", true}, {"score", true}});
    for (const auto& c : curves) {
        for (const auto& [step, score] : c.points) {
            t.add_row({c.model, std::string(to_string(c.corpus)), seed_text(c.seed), format_number(step),
                       format_number(score)});
        }
    }
    return t;
}

Table UncertaintyResult::final_table() const {
    Table t({{"model", false}, {"corpus", false}, {"seed", true}, {"final_score", true}, {"relative_drop", true}});
    for (const auto& f : finals) {
        t.add_row({f.model, std::string(to_string(f.corpus)), seed_text(f.seed), format_number(f.score),
                   format_number(f.relative_drop)});
    }
    return t;
}

const UncertaintyResult::Final& UncertaintyResult::find(std::string_view model, Provenance corpus,
                                                       std::uint64_t seed) const {
    for (const auto& f : finals) {
        if (f.model == model && f.corpus == corpus && f.seed == seed) return f;
    }
    throw Error("no final score for " + std::string(model) + "/" + std::string(to_string(corpus)) + "/" +
                seed_text(seed));
}

Table FrequencyResult::table() const {
    Table t({{"model", false}, {"corpus", false}, {"seed", true}, {"band", false}, {"words", true}, {"score", true}});
    for (const auto& r : rows) {
        t.add_row({r.model, std::string(to_string(r.corpus)), seed_text(r.seed), r.band, format_number(r.words),
                   format_number(r.score)});
    }
    return t;
}

Table HomonymResult::table() const {
    Table t({{"model", false},
             {"corpus", false},
             {"seed", true},
             {"band", false},
             {"word", false},
             {"trial", true},
             {"meaning", false},
             {"referent", false},
             {"probability", true},
             {"comprehension", true}});
    for (const auto& r : rows) {
        t.add_row({r.model, "base", seed_text(r.seed), r.band, r.word, format_number(r.trial),
                   r.first ? "first" : "second", r.referent, format_number(r.probability),
                   format_number(r.comprehension)});
    }
    return t;
}

Table SynonymResult::table() const {
    Table t({{"model", false},
             {"corpus", false},
             {"seed", true},
             {"trial", true},
             {"label", false},
             {"probability", true},
             {"comprehension", true},
             {"simulations", true}});
    for (const auto& r : rows) {
        t.add_row({r.model, "base", seed_text(r.seed), format_number(r.trial), r.first ? "first" : "second",
                   format_number(r.probability), format_number(r.comprehension), format_number(r.simulations)});
    }
    return t;
}

Table OracleResult::word_table() const {
    Table t({{"seed", true},
             {"word", false},
             {"occurrences", true},
             {"batch_argmax", false},
             {"incremental_argmax", false},
             {"agree", true},
             {"counted", true}});
    for (const auto& w : words) {
        t.add_row({seed_text(w.seed), w.word, format_number(w.occurrences), w.batch_argmax, w.incremental_argmax,
                   w.agree ? "1" : "0", w.counted ? "1" : "0"});
    }
    return t;
}

Table OracleResult::likelihood_table() const {
    Table t({{"seed", true}, {"iteration", true}, {"log_likelihood", true}, {"monotone", true}});
    for (const auto& s : seeds) {
        for (std::size_t i = 0; i < s.log_likelihood.size(); ++i) {
            const bool ok = i == 0 || s.log_likelihood[i] >= s.log_likelihood[i - 1] - 1e-9;
            t.add_row({seed_text(s.seed), format_number(i), format_number(s.log_likelihood[i]), ok ? "1" : "0"});
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Experiments

CurveResult run_curve(const ExperimentConfig& config) {
    config.validate();
    const auto models = config.model_configs();
    const auto corpora = prepare_all(config);
    CurveResult result;
    result.curves.resize(models.size() * corpora.size());
    parallel_for(result.curves.size(), config.jobs, [&](std::size_t i) {
        const auto& m = models[i / corpora.size()];
        const auto& c = corpora[i % corpora.size()];
        result.curves[i] = train_curve(m, c.base, c.gold, config.checkpoint_every, c.seed);
    });
    return result;
}

UncertaintyResult run_uncertainty(const ExperimentConfig& config) {
    config.validate();
    const auto models = config.model_configs();
    const auto corpora = prepare_all(config);
    for (const auto& c : corpora) {
        if (c.source.size() < 3) throw ConfigError("uncertainty needs a source corpus of at least 3 pairs");
    }
    const std::size_t np = std::size(kProvenances);
    UncertaintyResult result;
    result.curves.resize(models.size() * corpora.size() * np);
    parallel_for(result.curves.size(), config.jobs, [&](std::size_t i) {
        const auto& m = models[i / (corpora.size() * np)];
        const auto& c = corpora[(i / np) % corpora.size()];
        const Provenance p = kProvenances[i % np];
        result.curves[i] = train_curve(m, c.by_provenance(p), c.gold, config.checkpoint_every, c.seed);
    });
    for (std::size_t i = 0; i < result.curves.size(); i += np) {
        const double base = result.curves[i].final_score();
        for (std::size_t k = 0; k < np; ++k) {
            const auto& curve = result.curves[i + k];
            const double score = curve.final_score();
            result.finals.push_back({curve.model, curve.corpus, curve.seed, score, k == 0 ? 0.0 : (base - score) / base});
        }
    }
    return result;
}

FrequencyResult run_frequency(const ExperimentConfig& config) {
    config.validate();
    const auto models = config.model_configs();
    const auto corpora = prepare_all(config);
    const std::size_t np = std::size(kProvenances);
    std::vector<std::vector<FrequencyResult::Row>> cells(models.size() * corpora.size() * np);
    parallel_for(cells.size(), config.jobs, [&](std::size_t i) {
        const auto& m = models[i / (corpora.size() * np)];
        const auto& c = corpora[(i / np) % corpora.size()];
        const Provenance p = kProvenances[i % np];
        const Corpus& corpus = c.by_provenance(p);
        LearnerState state(m);
        train(state, corpus, corpus.size());
        const FrequencyBands bands{config.bands, word_counts(corpus)};
        const auto report = frequency_split_report(state, c.gold, bands);
        std::map<std::string, std::size_t> sizes;
        for (const auto& w : state.observed_words()) {
            if (!c.gold.contains(w)) continue;
            if (const auto* b = bands.band_of(bands.counts.at(w))) ++sizes[b->label];
        }
        // Rows follow the configured band order; empty bands are absent.
        for (const auto& b : config.bands) {
            auto it = report.find(b.label);
            if (it == report.end()) continue;
            cells[i].push_back({m.id(), p, c.seed, b.label, sizes[b.label], it->second});
        }
    });
    FrequencyResult result;
    for (auto& cell : cells) {
        for (auto& r : cell) result.rows.push_back(std::move(r));
    }
    return result;
}

HomonymResult run_homonym(const ExperimentConfig& config) {
    config.validate();
    const auto models = config.model_configs();
    const auto corpora = prepare_all(config);
    const auto& hc = config.homonym;
    const Referent dax = novel_referent(hc.novel_referent);

    // Probe words and trials depend only on the seed, so every model sees the
    // same probes.
    struct Probe {
        std::string band;
        Word word;
        std::vector<InputPair> trials;
    };
    std::vector<std::vector<Probe>> probes(corpora.size());
    parallel_for(corpora.size(), config.jobs, [&](std::size_t s) {
        const auto& c = corpora[s];
        const auto counts = word_counts(c.base.slice(0, std::min(hc.training_cutoff, c.base.size())));
        for (std::size_t r = 0; r < hc.ranges.size(); ++r) {
            const auto& range = hc.ranges[r];
            std::vector<Word> words;
            if (auto it = hc.probe_words.find(range.label); it != hc.probe_words.end()) {
                for (const auto& w : it->second) words.emplace_back(w);
            } else {
                words = select_probe_words(counts, c.gold, {range}, hc.words_per_band, derive_seed(c.seed, 0x4d00 + r))
                            .at(range.label);
            }
            for (const auto& w : words) {
                ProbeOptions opts{hc.n_trials, hc.training_cutoff, derive_seed(c.seed, fnv1a(w.str()))};
                probes[s].push_back({range.label, w, build_homonym_trials(c.base, w, dax, c.gold, opts)});
            }
        }
    });

    std::vector<std::vector<HomonymResult::Row>> cells(models.size() * corpora.size());
    parallel_for(cells.size(), config.jobs, [&](std::size_t i) {
        const auto& m = models[i / corpora.size()];
        const std::size_t s = i % corpora.size();
        const auto& c = corpora[s];
        const LearnerState trained = train_prefix(m, c.base, hc.training_cutoff);
        for (const auto& probe : probes[s]) {
            const ReferentSet& first = c.gold.referents(probe.word);
            std::string first_name;
            for (const auto& r : first) first_name += (first_name.empty() ? "" : " ") + r.str();
            LearnerState state = trained;
            for (std::size_t t = 0; t <= probe.trials.size(); ++t) {
                if (t > 0) update(state, probe.trials[t - 1]);
                double p1 = 0.0;
                for (const auto& r : first) p1 += static_cast<double>(meaning_probability(state, probe.word, r));
                cells[i].push_back({m.id(), c.seed, probe.band, probe.word.str(), t, true, first_name, p1,
                                    comprehension_score(state, probe.word, first)});
                cells[i].push_back({m.id(), c.seed, probe.band, probe.word.str(), t, false, dax.str(),
                                    static_cast<double>(meaning_probability(state, probe.word, dax)),
                                    comprehension_score(state, probe.word, ReferentSet{dax})});
            }
        }
    });
    HomonymResult result;
    for (auto& cell : cells) {
        for (auto& r : cell) result.rows.push_back(std::move(r));
    }
    return result;
}

SynonymResult run_synonym(const ExperimentConfig& config) {
    config.validate();
    const auto models = config.model_configs();
    const auto& sc = config.synonym;
    const Word dax = novel_word(sc.novel_word);
    const std::size_t n_sims = sc.simulations;
    const std::size_t n_points = sc.n_trials + 1;

    // cell (seed, simulation) -> per model, per trial: (p1, c1, p2, c2)
    struct Point {
        double p1 = 0, c1 = 0, p2 = 0, c2 = 0;
    };
    std::vector<std::vector<std::vector<Point>>> cells(config.seeds.size() * n_sims);
    std::optional<SeedCorpora> file_corpora;
    if (config.source.corpus_path) file_corpora = prepare_corpora(config, config.seeds.front());

    parallel_for(cells.size(), config.jobs, [&](std::size_t i) {
        const std::uint64_t seed = config.seeds[i / n_sims];
        const std::uint64_t sim_seed = derive_seed(seed, 0x5100 + i % n_sims);
        SeedCorpora local;
        const SeedCorpora* c = file_corpora ? &*file_corpora : nullptr;
        if (!c) {
            local = prepare_corpora(config, sim_seed);
            c = &local;
        }
        const Corpus training = c->base.slice(0, std::min(sc.training_cutoff, c->base.size()));
        std::vector<Word> candidates;
        for (const auto& [w, n] : word_counts(training)) {
            if (n >= sc.min_count && c->gold.contains(w)) candidates.push_back(w);
        }
        if (candidates.empty()) {
            throw ConstructionError("no familiar word with at least " + std::to_string(sc.min_count) +
                                    " occurrences in the synonym training pairs");
        }
        Rng rng(derive_seed(sim_seed, 1));
        const Word label = candidates[rng.uniform_index(candidates.size())];
        const Referent target = *c->gold.referents(label).begin();
        const auto trials = build_synonym_trials(c->base, dax, target, c->gold,
                                                 {sc.n_trials, sc.training_cutoff, derive_seed(sim_seed, 2)});
        const ReferentSet target_set{target};
        auto& out = cells[i];
        out.assign(models.size(), std::vector<Point>(n_points));
        for (std::size_t m = 0; m < models.size(); ++m) {
            LearnerState state(models[m]);
            train(state, training, training.size());
            for (std::size_t t = 0; t < n_points; ++t) {
                if (t > 0) update(state, trials[t - 1]);
                out[m][t] = {static_cast<double>(meaning_probability(state, label, target)),
                             comprehension_score(state, label, target_set),
                             static_cast<double>(meaning_probability(state, dax, target)),
                             comprehension_score(state, dax, target_set)};
            }
        }
    });

    SynonymResult result;
    for (std::size_t m = 0; m < models.size(); ++m) {
        for (std::size_t s = 0; s < config.seeds.size(); ++s) {
            for (int label = 0; label < 2; ++label) {
                for (std::size_t t = 0; t < n_points; ++t) {
                    double p = 0.0, cs = 0.0;
                    for (std::size_t k = 0; k < n_sims; ++k) {
                        const auto& pt = cells[s * n_sims + k][m][t];
                        p += label == 0 ? pt.p1 : pt.p2;
                        cs += label == 0 ? pt.c1 : pt.c2;
                    }
                    const double n = static_cast<double>(n_sims);
                    result.rows.push_back({models[m].id(), config.seeds[s], t, label == 0, p / n, cs / n, n_sims});
                }
            }
        }
    }
    return result;
}

OracleResult oracle_check_corpus(const Corpus& corpus, const GoldLexicon* gold, std::uint64_t seed,
                                 const ExperimentConfig& config) {
    if (corpus.empty()) throw ConfigError("oracle check needs a non-empty corpus");
    if (corpus.size() > OracleConfig::kMaxPairs) {
        throw ConfigError("oracle check is limited to " + std::to_string(OracleConfig::kMaxPairs) + " pairs, got " +
                          std::to_string(corpus.size()));
    }
    const auto run = batch_em(corpus, config.oracle.iterations);
    LearnerState state(ModelConfig{Alignment::WordCompetition, Representation::ReferentConditional, config.lambda,
                                   config.beta});
    train(state, corpus, corpus.size());

    OracleResult result;
    OracleResult::SeedSummary summary;
    summary.seed = seed;
    summary.log_likelihood = run.log_likelihood;
    for (std::size_t i = 1; i < run.log_likelihood.size(); ++i) {
        if (run.log_likelihood[i] < run.log_likelihood[i - 1] - 1e-9) summary.likelihood_monotone = false;
    }
    for (const auto& [w, n] : word_counts(corpus)) {
        OracleResult::WordRow row;
        row.seed = seed;
        row.word = w.str();
        row.occurrences = n;
        row.batch_argmax = run.model.argmax(w).str();
        row.incremental_argmax = best_referent(state, w).value().str();
        row.agree = row.batch_argmax == row.incremental_argmax;
        const bool homonym = gold && gold->contains(w) && gold->referents(w).size() > 1;
        row.counted = n >= config.oracle.min_occurrences && !homonym;
        if (row.counted) {
            ++summary.evaluated;
            if (row.agree) ++summary.agreed;
        }
        result.words.push_back(std::move(row));
    }
    summary.low_evidence = summary.evaluated == 0;
    result.low_evidence = summary.low_evidence;
    result.agreement = summary.evaluated == 0 ? 1.0
                                              : static_cast<double>(summary.agreed) /
                                                    static_cast<double>(summary.evaluated);
    result.passed = summary.likelihood_monotone && result.agreement >= config.thresholds.oracle_agreement;
    result.seeds.push_back(std::move(summary));
    return result;
}

OracleResult run_oracle_check(const ExperimentConfig& config) {
    config.validate();
    std::vector<OracleResult> parts(config.seeds.size());
    parallel_for(parts.size(), config.jobs, [&](std::size_t i) {
        const auto& oc = config.oracle;
        const CorpusSpec spec{oc.n_pairs, oc.word_vocab, oc.min_len, oc.max_len, oc.zipf_exponent,
                              derive_seed(config.seeds[i], 0x0AC1E)};
        const auto [corpus, gold] = generate_synthetic_corpus(spec);
        parts[i] = oracle_check_corpus(corpus, &gold, config.seeds[i], config);
    });
    OracleResult result;
    std::size_t evaluated = 0, agreed = 0;
    bool monotone = true;
    for (auto& p : parts) {
        for (auto& w : p.words) result.words.push_back(std::move(w));
        for (auto& s : p.seeds) {
            evaluated += s.evaluated;
            agreed += s.agreed;
            monotone = monotone && s.likelihood_monotone;
            result.seeds.push_back(std::move(s));
        }
    }
    result.low_evidence = evaluated == 0;
    result.agreement = evaluated == 0 ? 1.0 : static_cast<double>(agreed) / static_cast<double>(evaluated);
    result.passed = monotone && result.agreement >= config.thresholds.oracle_agreement;
    return result;
}

// ---------------------------------------------------------------------------
// Artifacts

OutputFormat output_format_from_string(std::string_view s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "jsonl") return OutputFormat::Jsonl;
    throw ConfigError("unknown output format '" + std::string(s) + "' (expected csv or jsonl)");
}

json RunManifest::to_json() const {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
    return {{"artifact_version", artifact_version},
            {"config_hash", hash},
            {"files", files},
            {"wall_clock_seconds", wall_clock_seconds}};
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

std::vector<std::string> write_artifact(const std::string& out_dir, const std::string& stem, const Table& table,
                                        OutputFormat format, const std::optional<std::string>& svg_title) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> paths;
    std::ostringstream csv;
    write_csv(csv, table);
    if (format == OutputFormat::Csv) {
        const auto path = std::filesystem::path(out_dir) / (stem + ".csv");
        write_text(path, csv.str());
        paths.push_back(path.string());
    } else {
        std::ostringstream jsonl;
        write_jsonl(jsonl, table);
        const auto path = std::filesystem::path(out_dir) / (stem + ".jsonl");
        write_text(path, jsonl.str());
        paths.push_back(path.string());
    }
    if (svg_title) {
        std::istringstream in(csv.str());
        const auto path = std::filesystem::path(out_dir) / (stem + ".svg");
        write_text(path, render_table_svg(read_csv(in), *svg_title));
        paths.push_back(path.string());
    }
    return paths;
}

void write_manifest(const std::string& out_dir, const RunManifest& manifest) {
    std::filesystem::create_directories(out_dir);
    write_text(std::filesystem::path(out_dir) / "manifest.json", manifest.to_json().dump(2) + "\n");
}

std::vector<std::string> write_curve(const std::string& out_dir, const CurveResult& r, OutputFormat f) {
    return write_artifact(out_dir, "curve", r.table(), f, std::string{});
}

std::vector<std::string> write_uncertainty(const std::string& out_dir, const UncertaintyResult& r, OutputFormat f) {
    auto paths = write_artifact(out_dir, "uncertainty_curves", r.curve_table(), f, std::string{});
    auto more = write_artifact(out_dir, "uncertainty", r.final_table(), f, std::string{});
    paths.insert(paths.end(), more.begin(), more.end());
    return paths;
}

std::vector<std::string> write_frequency(const std::string& out_dir, const FrequencyResult& r, OutputFormat f) {
    return write_artifact(out_dir, "frequency", r.table(), f, std::string{});
}

std::vector<std::string> write_homonym(const std::string& out_dir, const HomonymResult& r, OutputFormat f) {
    return write_artifact(out_dir, "homonym", r.table(), f, std::string{});
}

std::vector<std::string> write_synonym(const std::string& out_dir, const SynonymResult& r, OutputFormat f) {
    return write_artifact(out_dir, "synonym", r.table(), f, std::string{});
}

std::vector<std::string> write_oracle(const std::string& out_dir, const OracleResult& r, OutputFormat f) {
    auto paths = write_artifact(out_dir, "oracle_words", r.word_table(), f, std::nullopt);
    auto more = write_artifact(out_dir, "oracle_likelihood", r.likelihood_table(), f, std::nullopt);
    paths.insert(paths.end(), more.begin(), more.end());
    return paths;
}

BatteryResult run_battery(const ExperimentConfig& config, const std::string& out_dir, OutputFormat format) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    BatteryResult b;
    b.manifest.config_hash = config.hash();
    b.curve = run_curve(config);
    b.manifest.files["curve"] = write_curve(out_dir, b.curve, format);
    b.uncertainty = run_uncertainty(config);
    b.manifest.files["uncertainty"] = write_uncertainty(out_dir, b.uncertainty, format);
    b.frequency = run_frequency(config);
    b.manifest.files["frequency"] = write_frequency(out_dir, b.frequency, format);
    b.homonym = run_homonym(config);
    b.manifest.files["homonym"] = write_homonym(out_dir, b.homonym, format);
    b.synonym = run_synonym(config);
    b.manifest.files["synonym"] = write_synonym(out_dir, b.synonym, format);
    b.oracle = run_oracle_check(config);
    b.manifest.files["oracle-check"] = write_oracle(out_dir, b.oracle, format);
    b.manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(out_dir, b.manifest);
    return b;
}

}  // namespace xsl
