// xsl-lab: corpus tools, single-model training and the experiment battery.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "xsl/error.hpp"
#include "xsl/evaluation.hpp"
#include "xsl/experiments.hpp"
#include "xsl/generator.hpp"
#include "xsl/learner.hpp"
#include "xsl/plot.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitOracleFailed = 2;

struct Globals {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string format = "csv";
};

std::string resolve_out(const Globals& g) {
    if (!g.out_dir.empty()) return g.out_dir;
    if (const char* env = std::getenv("XSL_LAB_OUT"); env && *env) return env;
    return "xsl-out";
}

xsl::ExperimentConfig load_config(const Globals& g) {
    xsl::ExperimentConfig c = g.config_path.empty() ? xsl::ExperimentConfig{}
                                                    : xsl::ExperimentConfig::load_file(g.config_path);
    if (g.seed) c.seeds = {*g.seed};
    c.validate();
    return c;
}

void print_paths(const std::vector<std::string>& paths) {
    for (const auto& p : paths) std::cout << p << '\n';
}

void write_manifest_for(const Globals& g, const xsl::ExperimentConfig& c, const std::string& name,
                        const std::vector<std::string>& paths, double seconds) {
    xsl::RunManifest m;
    m.config_hash = c.hash();
    m.files[name] = paths;
    m.wall_clock_seconds = seconds;
    xsl::write_manifest(resolve_out(g), m);
}

template <class Run, class Write>
void run_experiment(const Globals& g, const std::string& name, Run run, Write write) {
    const auto config = load_config(g);
    const auto start = std::chrono::steady_clock::now();
    const auto result = run(config);
    const auto paths = write(resolve_out(g), result, xsl::output_format_from_string(g.format));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest_for(g, config, name, paths, seconds);
    print_paths(paths);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-situational word learning lab"};
    app.require_subcommand(1);
    Globals g;
    std::uint64_t seed_value = 0;
    app.add_option("--config", g.config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--out", g.out_dir, "Output directory (default: $XSL_LAB_OUT or ./xsl-out)");
    auto* seed_opt = app.add_option("--seed", seed_value, "Run with this single seed instead of the config's");
    app.add_option("--format", g.format, "Table format")->check(CLI::IsMember({"csv", "jsonl"}));

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic corpus and its gold lexicon");
    xsl::CorpusSpec spec;
    std::string corpus_format = "pairs-text";
    gen->add_option("--pairs", spec.n_pairs, "Number of input pairs")->capture_default_str();
    gen->add_option("--vocab", spec.word_vocab, "Word vocabulary size")->capture_default_str();
    gen->add_option("--min-len", spec.min_len, "Shortest utterance")->capture_default_str();
    gen->add_option("--max-len", spec.max_len, "Longest utterance")->capture_default_str();
    gen->add_option("--zipf", spec.zipf_exponent, "Zipf exponent")->capture_default_str();
    gen->add_option("--corpus-format", corpus_format, "pairs-text or jsonl")
        ->check(CLI::IsMember({"pairs-text", "jsonl"}))
        ->capture_default_str();

    // transform
    auto* tr = app.add_subcommand("transform", "Build the base, RU+ or LU+ corpus from a source sequence");
    std::string tr_in, tr_kind = "base", tr_file;
    tr->add_option("--in", tr_in, "Source corpus")->required()->check(CLI::ExistingFile);
    tr->add_option("--kind", tr_kind, "base, ru_plus or lu_plus")
        ->check(CLI::IsMember({"base", "ru_plus", "lu_plus"}))
        ->capture_default_str();
    tr->add_option("--to", tr_file, "Output corpus file")->required();
    tr->add_option("--corpus-format", corpus_format, "pairs-text or jsonl")
        ->check(CLI::IsMember({"pairs-text", "jsonl"}));

    // train
    auto* trn = app.add_subcommand("train", "Train one model on a corpus file and save its state");
    std::string trn_corpus, trn_model = "wc/cond", trn_state, trn_lexicon, trn_resume;
    double trn_lambda = 0.0002;
    std::size_t trn_beta = 5000, trn_every = 100;
    trn->add_option("--corpus", trn_corpus, "Corpus file")->required()->check(CLI::ExistingFile);
    trn->add_option("--corpus-format", corpus_format, "pairs-text or jsonl")
        ->check(CLI::IsMember({"pairs-text", "jsonl"}));
    trn->add_option("--model", trn_model, "Model id (e.g. wc/cond) or label")->capture_default_str();
    trn->add_option("--lambda", trn_lambda, "Smoothing mass")->capture_default_str();
    trn->add_option("--beta", trn_beta, "Referent vocabulary bound")->capture_default_str();
    trn->add_option("--checkpoint-every", trn_every, "Pairs between checkpoints")->capture_default_str();
    trn->add_option("--lexicon", trn_lexicon, "Gold lexicon; adds average comprehension to checkpoints")
        ->check(CLI::ExistingFile);
    trn->add_option("--resume", trn_resume, "Continue from a saved state")->check(CLI::ExistingFile);
    trn->add_option("--state", trn_state, "Where to save the final state (default: <out>/state.json)");

    // eval
    auto* ev = app.add_subcommand("eval", "Comprehension scores of a saved state");
    std::string ev_state, ev_lexicon, ev_corpus;
    ev->add_option("--state", ev_state, "Saved learner state")->required()->check(CLI::ExistingFile);
    ev->add_option("--lexicon", ev_lexicon, "Gold lexicon")->required()->check(CLI::ExistingFile);
    ev->add_option("--corpus", ev_corpus, "Training corpus; adds the frequency-band split")->check(CLI::ExistingFile);
    ev->add_option("--corpus-format", corpus_format, "pairs-text or jsonl")
        ->check(CLI::IsMember({"pairs-text", "jsonl"}));

    auto* curve = app.add_subcommand("curve", "Learning curves on the base corpus");
    auto* unc = app.add_subcommand("uncertainty", "Base vs RU+ vs LU+");
    auto* freq = app.add_subcommand("frequency", "Comprehension by word-frequency band");
    auto* hom = app.add_subcommand("homonym", "Pseudo-homonym probe trials");
    auto* syn = app.add_subcommand("synonym", "Pseudo-synonym probe trials");
    auto* orc = app.add_subcommand("oracle-check", "Compare the incremental learner with batch EM");
    std::string orc_corpus, orc_lexicon;
    orc->add_option("--corpus", orc_corpus, "Check this corpus instead of generated ones")->check(CLI::ExistingFile);
    orc->add_option("--lexicon", orc_lexicon, "Gold lexicon for --corpus (homonyms are not failed)")
        ->check(CLI::ExistingFile);
    orc->add_option("--corpus-format", corpus_format, "pairs-text or jsonl")
        ->check(CLI::IsMember({"pairs-text", "jsonl"}));
    auto* all = app.add_subcommand("battery", "Run every experiment");

    auto* plot = app.add_subcommand("plot", "Render an experiment CSV as SVG");
    std::string plot_in, plot_to, plot_title;
    plot->add_option("--in", plot_in, "Experiment CSV")->required()->check(CLI::ExistingFile);
    plot->add_option("--to", plot_to, "SVG file (default: input with .svg)");
    plot->add_option("--title", plot_title, "Figure title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and version requests exit 0; every usage error is a config error.
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }
    if (seed_opt->count() > 0) g.seed = seed_value;

    try {
        const auto cformat = xsl::corpus_format_from_string(corpus_format);
        const auto tformat = xsl::output_format_from_string(g.format);

        if (gen->parsed()) {
            spec.seed = g.seed.value_or(1);
            const auto [corpus, lexicon] = xsl::generate_synthetic_corpus(spec);
            const auto out = std::filesystem::path(resolve_out(g));
            std::filesystem::create_directories(out);
            const auto cpath = out / (cformat == xsl::CorpusFormat::Jsonl ? "corpus.jsonl" : "corpus.txt");
            xsl::save_corpus_file(cpath.string(), corpus, cformat);
            xsl::save_lexicon_file((out / "lexicon.txt").string(), lexicon);
            std::cout << cpath.string() << '\n' << (out / "lexicon.txt").string() << '\n';
        } else if (tr->parsed()) {
            const auto in_format = tr_in.ends_with(".jsonl") ? xsl::CorpusFormat::Jsonl : xsl::CorpusFormat::PairsText;
            const auto source = xsl::load_corpus_file(tr_in, in_format);
            xsl::Corpus out = tr_kind == "base"      ? xsl::subsample_every_third(source)
                              : tr_kind == "ru_plus" ? xsl::make_ru_plus(source)
                                                     : xsl::make_lu_plus(source);
            xsl::save_corpus_file(tr_file, out, cformat);
            std::cout << tr_file << '\n';
        } else if (trn->parsed()) {
            const auto corpus = xsl::load_corpus_file(trn_corpus, cformat);
            std::optional<xsl::GoldLexicon> gold;
            if (!trn_lexicon.empty()) gold = xsl::load_lexicon_file(trn_lexicon);
            xsl::LearnerState state = trn_resume.empty()
                                          ? xsl::LearnerState(xsl::ModelConfig::from_id(trn_model, trn_lambda, trn_beta))
                                          : xsl::load_state_file(trn_resume);
            const auto checkpoints =
                xsl::train(state, corpus, trn_every, gold ? xsl::comprehension_hook(*gold) : xsl::CheckpointHook{});
            xsl::Table t({{"model", false},
                          {"corpus", false},
                          {"step", true},
                          {"observed_words", true},
                          {"observed_referents", true},
                          {"score", true}});
            for (const auto& c : checkpoints) {
                t.add_row({state.config().id(), std::string(xsl::to_string(corpus.provenance)),
                           xsl::format_number(c.step), xsl::format_number(c.observed_words),
                           xsl::format_number(c.observed_referents),
                           c.payload ? xsl::format_number(*c.payload) : std::string("nan")});
            }
            const std::string out = resolve_out(g);
            std::filesystem::create_directories(out);
            const std::string state_path =
                trn_state.empty() ? (std::filesystem::path(out) / "state.json").string() : trn_state;
            xsl::save_state_file(state_path, state);
            auto paths = xsl::write_artifact(out, "checkpoints", t, tformat, std::nullopt);
            paths.insert(paths.begin(), state_path);
            print_paths(paths);
        } else if (ev->parsed()) {
            const auto state = xsl::load_state_file(ev_state);
            const auto gold = xsl::load_lexicon_file(ev_lexicon);
            const auto report = xsl::comprehension_report(state, gold);
            xsl::Table t({{"model", false}, {"step", true}, {"word", false}, {"score", true}});
            for (const auto& [w, s] : report.per_word) {
                t.add_row({report.model, xsl::format_number(report.step), w.str(), xsl::format_number(s)});
            }
            auto paths = xsl::write_artifact(resolve_out(g), "eval", t, tformat, std::nullopt);
            std::cout << "average " << xsl::format_number(report.average) << '\n';
            if (!ev_corpus.empty()) {
                const auto corpus = xsl::load_corpus_file(ev_corpus, cformat);
                const xsl::FrequencyBands bands{xsl::FrequencyBands::default_bands(), xsl::word_counts(corpus)};
                for (const auto& [band, score] : xsl::frequency_split_report(state, gold, bands)) {
                    std::cout << "band " << band << ' ' << xsl::format_number(score) << '\n';
                }
            }
            print_paths(paths);
        } else if (curve->parsed()) {
            run_experiment(g, "curve", xsl::run_curve, xsl::write_curve);
        } else if (unc->parsed()) {
            run_experiment(g, "uncertainty", xsl::run_uncertainty, xsl::write_uncertainty);
        } else if (freq->parsed()) {
            run_experiment(g, "frequency", xsl::run_frequency, xsl::write_frequency);
        } else if (hom->parsed()) {
            run_experiment(g, "homonym", xsl::run_homonym, xsl::write_homonym);
        } else if (syn->parsed()) {
            run_experiment(g, "synonym", xsl::run_synonym, xsl::write_synonym);
        } else if (orc->parsed()) {
            const auto config = load_config(g);
            xsl::OracleResult r;
            if (!orc_corpus.empty()) {
                const auto corpus = xsl::load_corpus_file(orc_corpus, cformat);
                std::optional<xsl::GoldLexicon> gold;
                if (!orc_lexicon.empty()) gold = xsl::load_lexicon_file(orc_lexicon);
                r = xsl::oracle_check_corpus(corpus, gold ? &*gold : nullptr, config.seeds.front(), config);
            } else {
                r = xsl::run_oracle_check(config);
            }
            const auto paths = xsl::write_oracle(resolve_out(g), r, tformat);
            write_manifest_for(g, config, "oracle-check", paths, 0.0);
            print_paths(paths);
            std::cout << "agreement " << xsl::format_number(r.agreement) << (r.low_evidence ? " (low evidence)" : "")
                      << '\n'
                      << (r.passed ? "PASS" : "FAIL") << '\n';
            return r.passed ? kExitOk : kExitOracleFailed;
        } else if (all->parsed()) {
            const auto config = load_config(g);
            const auto b = xsl::run_battery(config, resolve_out(g), tformat);
            for (const auto& [name, paths] : b.manifest.files) print_paths(paths);
        } else if (plot->parsed()) {
            std::ifstream in(plot_in);
            if (!in) throw xsl::Error("cannot open '" + plot_in + "'");
            const auto table = xsl::read_csv(in);
            const std::string to =
                plot_to.empty() ? std::filesystem::path(plot_in).replace_extension(".svg").string() : plot_to;
            const std::string svg = xsl::render_table_svg(table, plot_title);
            std::ofstream out(to, std::ios::binary);
            if (!out) throw xsl::Error("cannot write '" + to + "'");
            out << svg;
            std::cout << to << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "xsl-lab: " << e.what() << '\n';
        return kExitError;
    }
    return kExitOk;
}
