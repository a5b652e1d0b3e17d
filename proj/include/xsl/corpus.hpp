#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "xsl/symbols.hpp"

namespace xsl {

// Ground-truth meanings. A word with two or more referents is a homonym; two
// words sharing a referent are synonyms.
class GoldLexicon {
public:
    GoldLexicon() = default;

    // Adds referents to a word's entry (union with any existing ones).
    void add(const Word& w, const ReferentSet& referents);
    void add(const Word& w, const Referent& r) { add(w, ReferentSet{r}); }

    bool contains(const Word& w) const { return entries_.contains(w); }
    // Throws MissingEntryError for unknown words.
    const ReferentSet& referents(const Word& w) const;
    // Every word whose entry contains r, in lexicographic order.
    std::vector<Word> labels_of(const Referent& r) const;

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::map<Word, ReferentSet>& entries() const noexcept { return entries_; }

    // Identity lexicon: each word maps to a referent with the same spelling
    // upper-cased.
    static GoldLexicon identity(const WordSet& words);

private:
    std::map<Word, ReferentSet> entries_;
};

struct InputPair {
    WordSet utterance;
    ReferentSet scene;
    std::size_t index = 0;  // 1-based position in its corpus

    friend bool operator==(const InputPair&, const InputPair&) = default;
};

enum class Provenance { Base, RuPlus, LuPlus, Synthetic, File };

std::string_view to_string(Provenance p) noexcept;
Provenance provenance_from_string(std::string_view s);

struct Corpus {
    std::vector<InputPair> pairs;
    Provenance provenance = Provenance::File;

    std::size_t size() const noexcept { return pairs.size(); }
    bool empty() const noexcept { return pairs.empty(); }

    // Builds a corpus from (utterance, scene) sets, numbering pairs 1..N.
    static Corpus from_sets(std::vector<std::pair<WordSet, ReferentSet>> sets, Provenance p);
    // Pairs [first, last) renumbered from 1.
    Corpus slice(std::size_t first, std::size_t last) const;
    Corpus concat(const Corpus& tail) const;

    friend bool operator==(const Corpus&, const Corpus&) = default;
};

enum class CorpusFormat { PairsText, Jsonl };

CorpusFormat corpus_format_from_string(std::string_view s);

// Throws ParseError naming the offending line, or on an empty corpus.
Corpus load_corpus(std::istream& in, CorpusFormat format);
Corpus load_corpus_file(const std::string& path, CorpusFormat format);
void save_corpus(std::ostream& out, const Corpus& corpus, CorpusFormat format);
void save_corpus_file(const std::string& path, const Corpus& corpus, CorpusFormat format);

// Lexicon text format: one entry per line, "word referent [referent ...]";
// '#' starts a comment line.
GoldLexicon load_lexicon(std::istream& in);
GoldLexicon load_lexicon_file(const std::string& path);
void save_lexicon(std::ostream& out, const GoldLexicon& lexicon);
void save_lexicon_file(const std::string& path, const GoldLexicon& lexicon);

// Union of the gold referents of every word in the utterance.
ReferentSet derive_scene_from_gold(const WordSet& utterance, const GoldLexicon& lexicon);

// Input pairs 1, 4, 7, ... of the source sequence.
Corpus subsample_every_third(const Corpus& corpus);
// Pair k keeps utterance 3k-2 and unions the scenes of pairs 3k-2..3k.
Corpus make_ru_plus(const Corpus& corpus);
// Pair k keeps scene 3k-2 and unions the utterances of pairs 3k-2..3k.
Corpus make_lu_plus(const Corpus& corpus);

// Token occurrences of each word across all utterances.
std::map<Word, std::size_t> word_counts(const Corpus& corpus);

}  // namespace xsl
