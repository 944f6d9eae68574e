#include "cxnprobe/text.hpp"

#include <array>
#include <cctype>

namespace cxnprobe::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// (base, combining) -> precomposed, Latin letters only.
struct Composition {
    char32_t base;
    char32_t mark;
    char32_t composed;
};

constexpr std::array<Composition, 52> kCompositions{{
    // grave U+0300
    {U'A', 0x300, 0xC0}, {U'E', 0x300, 0xC8}, {U'I', 0x300, 0xCC},
    {U'O', 0x300, 0xD2}, {U'U', 0x300, 0xD9},
    {U'a', 0x300, 0xE0}, {U'e', 0x300, 0xE8}, {U'i', 0x300, 0xEC},
    {U'o', 0x300, 0xF2}, {U'u', 0x300, 0xF9},
    // acute U+0301
    {U'A', 0x301, 0xC1}, {U'E', 0x301, 0xC9}, {U'I', 0x301, 0xCD},
    {U'O', 0x301, 0xD3}, {U'U', 0x301, 0xDA}, {U'Y', 0x301, 0xDD},
    {U'a', 0x301, 0xE1}, {U'e', 0x301, 0xE9}, {U'i', 0x301, 0xED},
    {U'o', 0x301, 0xF3}, {U'u', 0x301, 0xFA}, {U'y', 0x301, 0xFD},
    // circumflex U+0302
    {U'A', 0x302, 0xC2}, {U'E', 0x302, 0xCA}, {U'I', 0x302, 0xCE},
    {U'O', 0x302, 0xD4}, {U'U', 0x302, 0xDB},
    {U'a', 0x302, 0xE2}, {U'e', 0x302, 0xEA}, {U'i', 0x302, 0xEE},
    {U'o', 0x302, 0xF4}, {U'u', 0x302, 0xFB},
    // tilde U+0303
    {U'A', 0x303, 0xC3}, {U'N', 0x303, 0xD1}, {U'O', 0x303, 0xD5},
    {U'a', 0x303, 0xE3}, {U'n', 0x303, 0xF1}, {U'o', 0x303, 0xF5},
    // diaeresis U+0308
    {U'A', 0x308, 0xC4}, {U'E', 0x308, 0xCB}, {U'I', 0x308, 0xCF},
    {U'O', 0x308, 0xD6}, {U'U', 0x308, 0xDC},
    {U'a', 0x308, 0xE4}, {U'e', 0x308, 0xEB}, {U'i', 0x308, 0xEF},
    {U'o', 0x308, 0xF6}, {U'u', 0x308, 0xFC}, {U'y', 0x308, 0xFF},
    // cedilla U+0327
    {U'C', 0x327, 0xC7}, {U'c', 0x327, 0xE7},
    {U'S', 0x327, 0x15E},
}};

bool is_ws(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
           c == U'\v' || c == 0xA0;
}

}  // namespace

std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char b = static_cast<unsigned char>(s[i]);
        char32_t cp = kReplacement;
        std::size_t len = 1;
        if (b < 0x80) {
            cp = b;
        } else if ((b & 0xE0) == 0xC0) {
            len = 2;
            cp = b & 0x1F;
        } else if ((b & 0xF0) == 0xE0) {
            len = 3;
            cp = b & 0x0F;
        } else if ((b & 0xF8) == 0xF0) {
            len = 4;
            cp = b & 0x07;
        }
        if (len > 1) {
            if (i + len > s.size()) {
                cp = kReplacement;
                len = 1;
            } else {
                for (std::size_t k = 1; k < len; ++k) {
                    unsigned char cont = static_cast<unsigned char>(s[i + k]);
                    if ((cont & 0xC0) != 0x80) {
                        cp = kReplacement;
                        len = 1;
                        break;
                    }
                    cp = (cp << 6) | (cont & 0x3F);
                }
            }
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode_utf8(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

std::size_t codepoint_count(std::string_view s) {
    std::size_t n = 0;
    for (char c : s) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::size_t cp_to_byte(std::string_view s, std::size_t cp) {
    std::size_t seen = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
            if (seen == cp) return i;
            ++seen;
        }
        ++i;
    }
    return s.size();
}

std::string substr_cp(std::string_view s, std::size_t cp_start, std::size_t cp_end) {
    if (cp_end < cp_start) cp_end = cp_start;
    const std::size_t b0 = cp_to_byte(s, cp_start);
    // Scan forward from b0 rather than from the beginning.
    std::size_t b1 = b0;
    std::size_t remaining = cp_end - cp_start;
    while (b1 < s.size() && remaining > 0) {
        ++b1;
        while (b1 < s.size() && (static_cast<unsigned char>(s[b1]) & 0xC0) == 0x80) ++b1;
        --remaining;
    }
    return std::string(s.substr(b0, b1 - b0));
}

char32_t fold_cp(char32_t c) {
    if (c >= U'A' && c <= U'Z') return c + 0x20;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;  // Latin-1 uppercase
    if (c >= 0x100 && c <= 0x137 && (c % 2) == 0) return c + 1;
    if (c >= 0x139 && c <= 0x148 && (c % 2) == 1) return c + 1;
    if (c >= 0x14A && c <= 0x177 && (c % 2) == 0) return c + 1;
    if (c == 0x178) return 0xFF;  // Y with diaeresis
    if (c == 0x179 || c == 0x17B || c == 0x17D) return c + 1;
    return c;
}

std::string casefold(std::string_view s) {
    auto cps = decode_utf8(s);
    for (auto& c : cps) c = fold_cp(c);
    return encode_utf8(cps);
}

std::string compose_nfc(std::string_view s) {
    auto cps = decode_utf8(s);
    std::vector<char32_t> out;
    out.reserve(cps.size());
    for (char32_t c : cps) {
        if (!out.empty()) {
            bool composed = false;
            for (const auto& comp : kCompositions) {
                if (comp.base == out.back() && comp.mark == c) {
                    out.back() = comp.composed;
                    composed = true;
                    break;
                }
            }
            if (composed) continue;
        }
        out.push_back(c);
    }
    return encode_utf8(out);
}

std::string normalize_lemma(std::string_view s) {
    return casefold(compose_nfc(s));
}

std::vector<Token> whitespace_tokens(std::string_view s) {
    std::vector<Token> tokens;
    auto cps = decode_utf8(s);
    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && is_ws(cps[i])) ++i;
        if (i >= cps.size()) break;
        std::size_t start = i;
        std::string piece;
        while (i < cps.size() && !is_ws(cps[i])) {
            append_utf8(piece, cps[i]);
            ++i;
        }
        tokens.push_back(Token{std::move(piece), start, i});
    }
    return tokens;
}

std::size_t whitespace_token_count(std::string_view s) {
    std::size_t n = 0;
    bool in_token = false;
    for (char32_t c : decode_utf8(s)) {
        if (is_ws(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++n;
        }
    }
    return n;
}

namespace {

bool is_edge_punct(char32_t c) {
    if (c < 0x80) {
        return std::ispunct(static_cast<int>(c)) != 0;
    }
    // curly quotes, guillemets, dashes, ellipsis
    return c == 0x2018 || c == 0x2019 || c == 0x201C || c == 0x201D ||
           c == 0xAB || c == 0xBB || c == 0x2013 || c == 0x2014 || c == 0x2026;
}

}  // namespace

std::pair<std::size_t, std::size_t> strip_edge_punct_span(std::string_view token) {
    auto cps = decode_utf8(token);
    std::size_t b = 0;
    std::size_t e = cps.size();
    while (b < e && is_edge_punct(cps[b])) ++b;
    while (e > b && is_edge_punct(cps[e - 1])) --e;
    return {b, e};
}

std::string strip_edge_punct(std::string_view token) {
    auto cps = decode_utf8(token);
    auto [b, e] = strip_edge_punct_span(token);
    std::string out;
    for (std::size_t i = b; i < e; ++i) append_utf8(out, cps[i]);
    return out;
}

bool matches_preposition(std::string_view token, std::string_view prep) {
    const std::string t = casefold(strip_edge_punct(token));
    const std::string p = casefold(prep);
    if (t == p) return true;
    return (p == "a" || p == "e") && t == p + "d";
}

}  // namespace cxnprobe::text
