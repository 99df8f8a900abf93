#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>

namespace a11yens::detail {

inline std::string lower_ascii(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::string upper_ascii(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

// Whitespace-only check covering ASCII whitespace and U+00A0.
inline bool is_blank(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
            ++i;
        } else if (c == 0xC2 && i + 1 < text.size() &&
                   static_cast<unsigned char>(text[i + 1]) == 0xA0) {
            i += 2;
        } else {
            return false;
        }
    }
    return true;
}

}  // namespace a11yens::detail
