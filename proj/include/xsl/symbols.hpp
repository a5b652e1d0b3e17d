#pragma once

#include <compare>
#include <functional>
#include <set>
#include <string>
#include <string_view>

namespace xsl {

// Symbols beginning with this character are reserved for probe material
// (novel words and referents). Corpus loaders and generators never emit them.
inline constexpr char kReservedPrefix = '!';

namespace detail {

bool valid_symbol(std::string_view s) noexcept;

// Word and Referent share representation but never compare to each other.
template <class Tag>
class Symbol {
public:
    Symbol() = default;
    explicit Symbol(std::string text);

    const std::string& str() const noexcept { return text_; }
    bool reserved() const noexcept { return !text_.empty() && text_.front() == kReservedPrefix; }

    friend auto operator<=>(const Symbol&, const Symbol&) = default;
    friend bool operator==(const Symbol&, const Symbol&) = default;

private:
    std::string text_;
};

}  // namespace detail

struct WordTag {};
struct ReferentTag {};

using Word = detail::Symbol<WordTag>;
using Referent = detail::Symbol<ReferentTag>;

using WordSet = std::set<Word>;
using ReferentSet = std::set<Referent>;

// Probe symbols in the reserved namespace, e.g. novel_referent("DAX") -> "!DAX".
Word novel_word(std::string_view name);
Referent novel_referent(std::string_view name);

}  // namespace xsl

template <class Tag>
struct std::hash<xsl::detail::Symbol<Tag>> {
    std::size_t operator()(const xsl::detail::Symbol<Tag>& s) const noexcept {
        return std::hash<std::string>{}(s.str());
    }
};
