#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace cxnprobe::text {

// UTF-8 helpers. All "offsets" in the public file formats and APIs are
// codepoint offsets, not byte offsets; conversion happens here.

std::vector<char32_t> decode_utf8(std::string_view s);
std::string encode_utf8(const std::vector<char32_t>& cps);
void append_utf8(std::string& out, char32_t cp);

std::size_t codepoint_count(std::string_view s);
// Byte position of the codepoint at index cp (clamped to s.size()).
std::size_t cp_to_byte(std::string_view s, std::size_t cp);
std::string substr_cp(std::string_view s, std::size_t cp_start, std::size_t cp_end);

// Case folding for ASCII, Latin-1 supplement and Latin Extended-A. Adequate
// for the Italian/English corpora; other scripts pass through unchanged.
char32_t fold_cp(char32_t c);
std::string casefold(std::string_view s);

// Composes combining grave/acute/circumflex/tilde/diaeresis/cedilla
// (U+0300..0303, U+0308, U+0327) with Latin base letters where a precomposed
// codepoint exists. Not full NFC; covers the corpus languages.
std::string compose_nfc(std::string_view s);

// NFC subset + casefold; the canonical form used for lemma comparisons.
std::string normalize_lemma(std::string_view s);

struct Token {
    std::string piece;
    std::size_t cp_start = 0;  // [cp_start, cp_end) codepoint offsets
    std::size_t cp_end = 0;
};

std::vector<Token> whitespace_tokens(std::string_view s);
std::size_t whitespace_token_count(std::string_view s);

// Strips leading/trailing ASCII punctuation and common quote marks.
std::string strip_edge_punct(std::string_view token);

// Codepoint span [start, end) of the stripped core within the token.
std::pair<std::size_t, std::size_t> strip_edge_punct_span(std::string_view token);

// Case-insensitive preposition match after edge-punct stripping, tolerating
// the Italian euphonic alternation (a -> ad, e -> ed).
bool matches_preposition(std::string_view token, std::string_view prep);

}  // namespace cxnprobe::text
