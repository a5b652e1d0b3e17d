#include "xsl/symbols.hpp"

#include "xsl/error.hpp"

namespace xsl {

namespace detail {

bool valid_symbol(std::string_view s) noexcept {
    if (s.empty()) return false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') return false;
    }
    return true;
}

template <class Tag>
Symbol<Tag>::Symbol(std::string text) : text_(std::move(text)) {
    if (!valid_symbol(text_)) {
        throw Error("invalid symbol '" + text_ + "': must be non-empty without whitespace");
    }
}

template class Symbol<WordTag>;
template class Symbol<ReferentTag>;

}  // namespace detail

Word novel_word(std::string_view name) {
    return Word(std::string(1, kReservedPrefix) + std::string(name));
}

Referent novel_referent(std::string_view name) {
    return Referent(std::string(1, kReservedPrefix) + std::string(name));
}

}  // namespace xsl
