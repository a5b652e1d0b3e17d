#pragma once

#include <initializer_list>
#include <string>

#include "xsl/corpus.hpp"

namespace xsl::test {

inline WordSet words(std::initializer_list<const char*> ws) {
    WordSet out;
    for (const char* w : ws) out.emplace(w);
    return out;
}

inline ReferentSet refs(std::initializer_list<const char*> rs) {
    ReferentSet out;
    for (const char* r : rs) out.emplace(r);
    return out;
}

inline InputPair pair(std::initializer_list<const char*> u, std::initializer_list<const char*> s,
                      std::size_t index = 1) {
    return InputPair{words(u), refs(s), index};
}

}  // namespace xsl::test
