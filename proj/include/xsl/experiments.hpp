#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "xsl/corpus.hpp"
#include "xsl/evaluation.hpp"
#include "xsl/generator.hpp"
#include "xsl/learner.hpp"
#include "xsl/probes.hpp"
#include "xsl/table.hpp"

namespace xsl {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr std::string_view kArtifactVersion = "0.1.0";

// Where the source sequence comes from. A file corpus is used as-is for every
// seed; a synthetic one is regenerated with the run seed.
struct CorpusSource {
    std::optional<std::string> corpus_path;
    CorpusFormat format = CorpusFormat::PairsText;
    std::optional<std::string> lexicon_path;
    CorpusSpec synthetic;  // seed is replaced by the run seed
};

struct HomonymConfig {
    std::size_t training_cutoff = 1000;
    std::size_t n_trials = 10;
    std::size_t words_per_band = 4;
    std::vector<CountRange> ranges = default_probe_ranges();
    // Explicit probe words per range label; ranges without a list are sampled.
    std::map<std::string, std::vector<std::string>> probe_words;
    std::string novel_referent = "DAX";
};

struct SynonymConfig {
    std::size_t simulations = 20;
    std::size_t training_cutoff = 1000;
    std::size_t n_trials = 10;
    std::size_t min_count = 5;  // training-prefix count of the familiar label
    std::string novel_word = "dax";
};

struct OracleConfig {
    std::size_t n_pairs = 20;
    std::size_t iterations = 3;
    std::size_t word_vocab = 12;
    std::size_t min_len = 1;
    std::size_t max_len = 3;
    double zipf_exponent = 1.0;
    std::size_t min_occurrences = 2;
    static constexpr std::size_t kMaxPairs = 100;
};

// Acceptance thresholds for the synthetic corpus. The CHILDES figures they
// relax are noted per field.
struct Thresholds {
    double high_band_min = 0.9;            // CHILDES: >= 0.96 for every model
    double low_band_gap = 0.1;             // CHILDES: >= 0.24
    double first_meaning_tolerance = 0.1;  // relative change allowed for the first meaning
    std::size_t max_non_increases = 1;     // second-meaning curve, homonym probes
    double ru_ordering_min_fraction = 0.8; // seeds on which 12% < 21% ordering must hold
    double oracle_agreement = 1.0;
};

struct ExperimentConfig {
    int schema_version = kConfigSchemaVersion;
    CorpusSource source;
    std::vector<std::string> models;  // model ids, table order by default
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::size_t checkpoint_every = 100;
    double lambda = 0.0002;
    std::size_t beta = 5000;
    std::vector<FrequencyBand> bands = FrequencyBands::default_bands();
    HomonymConfig homonym;
    SynonymConfig synonym;
    OracleConfig oracle;
    Thresholds thresholds;
    unsigned jobs = 0;  // worker threads; 0 = hardware concurrency. Never changes outputs.

    ExperimentConfig();

    // Throws ConfigError.
    void validate() const;
    std::vector<ModelConfig> model_configs() const;

    nlohmann::json to_json() const;
    // Missing keys take defaults; unknown keys are a ConfigError.
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load_file(const std::string& path);

    // FNV-1a of the canonical JSON, excluding fields that cannot change outputs.
    std::uint64_t hash() const;
};

std::uint64_t fnv1a(std::string_view data) noexcept;

// Corpora for one run seed.
struct SeedCorpora {
    std::uint64_t seed = 0;
    GoldLexicon gold;
    Corpus source;
    Corpus base;
    Corpus ru_plus;
    Corpus lu_plus;

    const Corpus& by_provenance(Provenance p) const;
};

SeedCorpora prepare_corpora(const ExperimentConfig& config, std::uint64_t seed);

struct CurveRecord {
    std::string model;
    Provenance corpus = Provenance::Base;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::size_t, double>> points;

    double final_score() const { return points.back().second; }
};

// Columns: model, corpus, seed, step, score.
Table curve_table(const std::vector<CurveRecord>& curves);

struct CurveResult {
    std::vector<CurveRecord> curves;
    Table table() const { return curve_table(curves); }
};

struct UncertaintyResult {
    struct Final {
        std::string model;
        Provenance corpus = Provenance::Base;
        std::uint64_t seed = 0;
        double score = 0.0;
        double relative_drop = 0.0;  // (base - variant) / base; 0 for base
    };
    std::vector<CurveRecord> curves;
    std::vector<Final> finals;

    Table curve_table() const { return xsl::curve_table(curves); }
    // Columns: model, corpus, seed, final_score, relative_drop.
    Table final_table() const;
    const Final& find(std::string_view model, Provenance corpus, std::uint64_t seed) const;
};

struct FrequencyResult {
    struct Row {
        std::string model;
        Provenance corpus = Provenance::Base;
        std::uint64_t seed = 0;
        std::string band;
        std::size_t words = 0;
        double score = 0.0;
    };
    std::vector<Row> rows;
    // Columns: model, corpus, seed, band, words, score.
    Table table() const;
};

struct HomonymResult {
    struct Row {
        std::string model;
        std::uint64_t seed = 0;
        std::string band;
        std::string word;
        std::size_t trial = 0;
        bool first = true;
        std::string referent;
        double probability = 0.0;
        double comprehension = 0.0;
    };
    std::vector<Row> rows;
    // Columns: model, corpus, seed, band, word, trial, meaning, referent,
    // probability, comprehension.
    Table table() const;
};

struct SynonymResult {
    struct Row {
        std::string model;
        std::uint64_t seed = 0;
        std::size_t trial = 0;
        bool first = true;
        double probability = 0.0;    // mean over simulations
        double comprehension = 0.0;  // mean over simulations
        std::size_t simulations = 0;
    };
    std::vector<Row> rows;
    // Columns: model, corpus, seed, trial, label, probability, comprehension, simulations.
    Table table() const;
};

struct OracleResult {
    struct WordRow {
        std::uint64_t seed = 0;
        std::string word;
        std::size_t occurrences = 0;
        std::string batch_argmax;
        std::string incremental_argmax;
        bool agree = false;
        bool counted = false;  // false for rare words and gold homonyms
    };
    struct SeedSummary {
        std::uint64_t seed = 0;
        std::vector<double> log_likelihood;
        bool likelihood_monotone = true;
        std::size_t evaluated = 0;
        std::size_t agreed = 0;
        bool low_evidence = false;
    };
    std::vector<WordRow> words;
    std::vector<SeedSummary> seeds;
    double agreement = 1.0;  // over counted words of every seed
    bool low_evidence = false;
    bool passed = false;

    // Columns: seed, word, occurrences, batch_argmax, incremental_argmax, agree, counted.
    Table word_table() const;
    // Columns: seed, iteration, log_likelihood, monotone.
    Table likelihood_table() const;
};

// Oracle check on one explicit corpus (at most OracleConfig::kMaxPairs pairs).
OracleResult oracle_check_corpus(const Corpus& corpus, const GoldLexicon* gold, std::uint64_t seed,
                                 const ExperimentConfig& config);

CurveResult run_curve(const ExperimentConfig& config);
UncertaintyResult run_uncertainty(const ExperimentConfig& config);
FrequencyResult run_frequency(const ExperimentConfig& config);
HomonymResult run_homonym(const ExperimentConfig& config);
SynonymResult run_synonym(const ExperimentConfig& config);
OracleResult run_oracle_check(const ExperimentConfig& config);

enum class OutputFormat { Csv, Jsonl };
OutputFormat output_format_from_string(std::string_view s);

struct RunManifest {
    std::uint64_t config_hash = 0;
    std::string artifact_version{kArtifactVersion};
    std::map<std::string, std::vector<std::string>> files;  // experiment -> paths
    double wall_clock_seconds = 0.0;

    nlohmann::json to_json() const;
};

// Writes <stem>.csv (or .jsonl) and, when svg_title is set, <stem>.svg
// rendered from the CSV text (an empty title picks the standard one, so
// `plot` on the CSV reproduces the file). Returns the written paths.
std::vector<std::string> write_artifact(const std::string& out_dir, const std::string& stem, const Table& table,
                                        OutputFormat format, const std::optional<std::string>& svg_title);

void write_manifest(const std::string& out_dir, const RunManifest& manifest);

struct BatteryResult {
    CurveResult curve;
    UncertaintyResult uncertainty;
    FrequencyResult frequency;
    HomonymResult homonym;
    SynonymResult synonym;
    OracleResult oracle;
    RunManifest manifest;
};

// Every experiment, written to out_dir with a manifest.
BatteryResult run_battery(const ExperimentConfig& config, const std::string& out_dir, OutputFormat format);

// Artifact writers for the individual experiments; each returns the paths written.
std::vector<std::string> write_curve(const std::string& out_dir, const CurveResult& r, OutputFormat f);
std::vector<std::string> write_uncertainty(const std::string& out_dir, const UncertaintyResult& r, OutputFormat f);
std::vector<std::string> write_frequency(const std::string& out_dir, const FrequencyResult& r, OutputFormat f);
std::vector<std::string> write_homonym(const std::string& out_dir, const HomonymResult& r, OutputFormat f);
std::vector<std::string> write_synonym(const std::string& out_dir, const SynonymResult& r, OutputFormat f);
std::vector<std::string> write_oracle(const std::string& out_dir, const OracleResult& r, OutputFormat f);

}  // namespace xsl
