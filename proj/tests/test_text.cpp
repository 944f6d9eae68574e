#include <doctest.h>

#include "cxnprobe/text.hpp"

using namespace cxnprobe;

TEST_CASE("utf8 codepoint counting and slicing") {
    const std::string s = "città su città";  // accented cps are 2 bytes
    CHECK(text::codepoint_count(s) == 14);
    CHECK(text::substr_cp(s, 0, 5) == "città");
    CHECK(text::substr_cp(s, 6, 8) == "su");
    CHECK(text::substr_cp(s, 9, 14) == "città");
    CHECK(text::cp_to_byte(s, 0) == 0);
    CHECK(text::cp_to_byte(s, 5) == 6);  // the à took two bytes
}

TEST_CASE("casefold covers ascii and latin accents") {
    CHECK(text::casefold("Strato") == "strato");
    CHECK(text::casefold("CITTÀ") == "città");
    CHECK(text::casefold("Übung") == "übung");
    CHECK(text::casefold("ŁÓDŹ") == "łódź");
}

TEST_CASE("nfc subset composes combining marks") {
    const std::string decomposed = "citta\xCC\x80";  // a + U+0300
    CHECK(text::compose_nfc(decomposed) == "città");
    CHECK(text::normalize_lemma("CITTA\xCC\x80") == "città");
    CHECK(text::normalize_lemma("Strato") == text::normalize_lemma("sTRATO"));
}

TEST_CASE("whitespace tokenization with codepoint offsets") {
    const auto tokens = text::whitespace_tokens("  città  su\tcittà ");
    REQUIRE(tokens.size() == 3);
    CHECK(tokens[0].piece == "città");
    CHECK(tokens[0].cp_start == 2);
    CHECK(tokens[0].cp_end == 7);
    CHECK(tokens[1].piece == "su");
    CHECK(tokens[2].cp_start == 12);
    CHECK(text::whitespace_token_count("uno due tre") == 3);
    CHECK(text::whitespace_token_count("") == 0);
}

TEST_CASE("edge punctuation stripping") {
    CHECK(text::strip_edge_punct("\"strato,\"") == "strato");
    CHECK(text::strip_edge_punct("(a)") == "a");
    CHECK(text::strip_edge_punct("su") == "su");
    CHECK(text::strip_edge_punct("«già»") == "già");
    auto [b, e] = text::strip_edge_punct_span("\"strato,\"");
    CHECK(b == 1);
    CHECK(e == 7);
}
