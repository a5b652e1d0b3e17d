#include "xsl/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "xsl/error.hpp"

namespace xsl {

namespace {

std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

bool is_blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(),
                       [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

template <class Sym>
std::set<Sym> parse_symbols(const std::vector<std::string>& tokens, std::size_t line_no,
                            std::string_view what) {
    std::set<Sym> out;
    for (const auto& t : tokens) {
        if (!detail::valid_symbol(t)) {
            throw ParseError("invalid " + std::string(what) + " symbol '" + t + "'", line_no);
        }
        if (t.front() == kReservedPrefix) {
            throw ParseError("symbol '" + t + "' uses the reserved '!' prefix", line_no);
        }
        out.insert(Sym(t));
    }
    if (out.empty()) throw ParseError("empty " + std::string(what), line_no);
    return out;
}

Corpus load_pairs_text(std::istream& in) {
    std::vector<std::pair<WordSet, ReferentSet>> sets;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::pair<std::string, std::size_t>> record;

    auto flush = [&]() {
        if (record.empty()) return;
        if (record.size() != 2) {
            throw ParseError("record must have exactly two lines (utterance, scene), found " +
                                 std::to_string(record.size()),
                             record.front().second);
        }
        auto u = parse_symbols<Word>(split_ws(record[0].first), record[0].second, "utterance");
        auto s = parse_symbols<Referent>(split_ws(record[1].first), record[1].second, "scene");
        sets.emplace_back(std::move(u), std::move(s));
        record.clear();
    };

    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (!line.empty() && line.front() == '#') continue;
        if (is_blank(line)) {
            flush();
            continue;
        }
        record.emplace_back(line, line_no);
        if (record.size() > 2) {
            throw ParseError("record has more than two lines; separate records with a blank line",
                             line_no);
        }
    }
    flush();
    if (sets.empty()) throw ParseError("empty corpus");
    return Corpus::from_sets(std::move(sets), Provenance::File);
}

Corpus load_jsonl(std::istream& in) {
    std::vector<std::pair<WordSet, ReferentSet>> sets;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (is_blank(line)) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        if (!j.is_object() || !j.contains("u") || !j.contains("s") || !j["u"].is_array() ||
            !j["s"].is_array()) {
            throw ParseError("expected an object with array keys \"u\" and \"s\"", line_no);
        }
        auto strings = [&](const nlohmann::json& arr) {
            std::vector<std::string> out;
            for (const auto& v : arr) {
                if (!v.is_string()) throw ParseError("non-string symbol", line_no);
                out.push_back(v.get<std::string>());
            }
            return out;
        };
        auto u = parse_symbols<Word>(strings(j["u"]), line_no, "utterance");
        auto s = parse_symbols<Referent>(strings(j["s"]), line_no, "scene");
        sets.emplace_back(std::move(u), std::move(s));
    }
    if (sets.empty()) throw ParseError("empty corpus");
    return Corpus::from_sets(std::move(sets), Provenance::File);
}

template <class Set>
std::string join(const Set& s) {
    std::string out;
    for (const auto& sym : s) {
        if (!out.empty()) out += ' ';
        out += sym.str();
    }
    return out;
}

template <class Set>
nlohmann::json to_json_array(const Set& s) {
    auto arr = nlohmann::json::array();
    for (const auto& sym : s) arr.push_back(sym.str());
    return arr;
}

void require_triplets(const Corpus& corpus, std::string_view op) {
    if (corpus.size() < 3) {
        throw ConfigError(std::string(op) + " needs at least 3 input pairs, got " +
                          std::to_string(corpus.size()));
    }
}

}  // namespace

void GoldLexicon::add(const Word& w, const ReferentSet& referents) {
    if (referents.empty()) throw Error("lexicon entry for '" + w.str() + "' has no referents");
    entries_[w].insert(referents.begin(), referents.end());
}

const ReferentSet& GoldLexicon::referents(const Word& w) const {
    auto it = entries_.find(w);
    if (it == entries_.end()) throw MissingEntryError("no gold entry for word '" + w.str() + "'");
    return it->second;
}

std::vector<Word> GoldLexicon::labels_of(const Referent& r) const {
    std::vector<Word> out;
    for (const auto& [w, refs] : entries_) {
        if (refs.contains(r)) out.push_back(w);
    }
    return out;
}

GoldLexicon GoldLexicon::identity(const WordSet& words) {
    GoldLexicon lex;
    for (const auto& w : words) {
        std::string up = w.str();
        std::transform(up.begin(), up.end(), up.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        lex.add(w, Referent(up));
    }
    return lex;
}

std::string_view to_string(Provenance p) noexcept {
    switch (p) {
        case Provenance::Base: return "base";
        case Provenance::RuPlus: return "ru_plus";
        case Provenance::LuPlus: return "lu_plus";
        case Provenance::Synthetic: return "synthetic";
        case Provenance::File: return "file";
    }
    return "file";
}

Provenance provenance_from_string(std::string_view s) {
    for (auto p : {Provenance::Base, Provenance::RuPlus, Provenance::LuPlus, Provenance::Synthetic,
                   Provenance::File}) {
        if (to_string(p) == s) return p;
    }
    throw ConfigError("unknown corpus provenance '" + std::string(s) + "'");
}

Corpus Corpus::from_sets(std::vector<std::pair<WordSet, ReferentSet>> sets, Provenance p) {
    Corpus c;
    c.provenance = p;
    c.pairs.reserve(sets.size());
    std::size_t index = 1;
    for (auto& [u, s] : sets) {
        c.pairs.push_back(InputPair{std::move(u), std::move(s), index++});
    }
    return c;
}

Corpus Corpus::slice(std::size_t first, std::size_t last) const {
    last = std::min(last, pairs.size());
    first = std::min(first, last);
    Corpus c;
    c.provenance = provenance;
    c.pairs.assign(pairs.begin() + static_cast<std::ptrdiff_t>(first),
                   pairs.begin() + static_cast<std::ptrdiff_t>(last));
    for (std::size_t i = 0; i < c.pairs.size(); ++i) c.pairs[i].index = i + 1;
    return c;
}

Corpus Corpus::concat(const Corpus& tail) const {
    Corpus c = *this;
    for (const auto& p : tail.pairs) {
        c.pairs.push_back(p);
        c.pairs.back().index = c.pairs.size();
    }
    return c;
}

CorpusFormat corpus_format_from_string(std::string_view s) {
    if (s == "pairs-text" || s == "text") return CorpusFormat::PairsText;
    if (s == "jsonl") return CorpusFormat::Jsonl;
    throw ConfigError("unknown corpus format '" + std::string(s) + "' (pairs-text|jsonl)");
}

Corpus load_corpus(std::istream& in, CorpusFormat format) {
    return format == CorpusFormat::PairsText ? load_pairs_text(in) : load_jsonl(in);
}

Corpus load_corpus_file(const std::string& path, CorpusFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open corpus file '" + path + "'");
    try {
        return load_corpus(in, format);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_corpus(std::ostream& out, const Corpus& corpus, CorpusFormat format) {
    if (format == CorpusFormat::PairsText) {
        bool first = true;
        for (const auto& p : corpus.pairs) {
            if (!first) out << '\n';
            first = false;
            out << join(p.utterance) << '\n' << join(p.scene) << '\n';
        }
        return;
    }
    for (const auto& p : corpus.pairs) {
        nlohmann::json j;
        j["u"] = to_json_array(p.utterance);
        j["s"] = to_json_array(p.scene);
        out << j.dump() << '\n';
    }
}

void save_corpus_file(const std::string& path, const Corpus& corpus, CorpusFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write corpus file '" + path + "'");
    save_corpus(out, corpus, format);
}

GoldLexicon load_lexicon(std::istream& in) {
    GoldLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (is_blank(line) || line.front() == '#') continue;
        auto tokens = split_ws(line);
        if (tokens.size() < 2) throw ParseError("lexicon entry needs a word and a referent", line_no);
        ReferentSet refs;
        for (std::size_t i = 1; i < tokens.size(); ++i) refs.insert(Referent(tokens[i]));
        lex.add(Word(tokens[0]), refs);
    }
    if (lex.empty()) throw ParseError("empty lexicon");
    return lex;
}

GoldLexicon load_lexicon_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open lexicon file '" + path + "'");
    try {
        return load_lexicon(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void save_lexicon(std::ostream& out, const GoldLexicon& lexicon) {
    for (const auto& [w, refs] : lexicon.entries()) out << w.str() << ' ' << join(refs) << '\n';
}

void save_lexicon_file(const std::string& path, const GoldLexicon& lexicon) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write lexicon file '" + path + "'");
    save_lexicon(out, lexicon);
}

ReferentSet derive_scene_from_gold(const WordSet& utterance, const GoldLexicon& lexicon) {
    if (utterance.empty()) throw Error("cannot derive a scene from an empty utterance");
    ReferentSet scene;
    for (const auto& w : utterance) {
        const auto& refs = lexicon.referents(w);
        scene.insert(refs.begin(), refs.end());
    }
    return scene;
}

Corpus subsample_every_third(const Corpus& corpus) {
    require_triplets(corpus, "subsample_every_third");
    std::vector<std::pair<WordSet, ReferentSet>> sets;
    for (std::size_t i = 0; i < corpus.size(); i += 3) {
        sets.emplace_back(corpus.pairs[i].utterance, corpus.pairs[i].scene);
    }
    return Corpus::from_sets(std::move(sets), Provenance::Base);
}

Corpus make_ru_plus(const Corpus& corpus) {
    require_triplets(corpus, "make_ru_plus");
    std::vector<std::pair<WordSet, ReferentSet>> sets;
    for (std::size_t i = 0; i < corpus.size(); i += 3) {
        ReferentSet scene = corpus.pairs[i].scene;
        for (std::size_t j = i + 1; j < std::min(i + 3, corpus.size()); ++j) {
            scene.insert(corpus.pairs[j].scene.begin(), corpus.pairs[j].scene.end());
        }
        sets.emplace_back(corpus.pairs[i].utterance, std::move(scene));
    }
    return Corpus::from_sets(std::move(sets), Provenance::RuPlus);
}

Corpus make_lu_plus(const Corpus& corpus) {
    require_triplets(corpus, "make_lu_plus");
    std::vector<std::pair<WordSet, ReferentSet>> sets;
    for (std::size_t i = 0; i < corpus.size(); i += 3) {
        WordSet utterance = corpus.pairs[i].utterance;
        for (std::size_t j = i + 1; j < std::min(i + 3, corpus.size()); ++j) {
            utterance.insert(corpus.pairs[j].utterance.begin(), corpus.pairs[j].utterance.end());
        }
        sets.emplace_back(std::move(utterance), corpus.pairs[i].scene);
    }
    return Corpus::from_sets(std::move(sets), Provenance::LuPlus);
}

std::map<Word, std::size_t> word_counts(const Corpus& corpus) {
    std::map<Word, std::size_t> counts;
    for (const auto& p : corpus.pairs) {
        for (const auto& w : p.utterance) ++counts[w];
    }
    return counts;
}

}  // namespace xsl
