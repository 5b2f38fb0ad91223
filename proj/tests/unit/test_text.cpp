#include "doctest.h"

#include "pyratext/errors.hpp"
#include "pyratext/text.hpp"

using namespace pyratext;
using Tokens = std::vector<std::string>;

TEST_CASE("tokenize examples") {
    CHECK(tokenize("Hello, World!") == Tokens{"hello", "world"});
    CHECK(tokenize("").empty());
    CHECK(tokenize("U.S. stocks fell 2%") == Tokens{"u.s", "stocks", "fell", "2%"});
}

TEST_CASE("tokenize whitespace and punctuation edges") {
    CHECK(tokenize("  a\tb\nc\r\n") == Tokens{"a", "b", "c"});
    CHECK(tokenize("--- ... !!") .empty());
    CHECK(tokenize("(quoted)") == Tokens{"quoted"});
    CHECK(tokenize("it's") == Tokens{"it's"});
    // U+00A0 NO-BREAK SPACE and U+3000 IDEOGRAPHIC SPACE separate tokens.
    CHECK(tokenize("a\xC2\xA0" "b\xE3\x80\x80" "c") == Tokens{"a", "b", "c"});
    // Non-ASCII letters pass through untouched.
    CHECK(tokenize("Caf\xC3\xA9") == Tokens{"caf\xC3\xA9"});
}

TEST_CASE("vocab frequency order") {
    const std::vector<Tokens> corpus{tokenize("a a b")};
    Vocab v = Vocab::build(corpus, 10);
    REQUIRE(v.size() == 4);
    CHECK(v.id("<pad>") == 0);
    CHECK(v.id("<unk>") == 1);
    CHECK(v.id("a") == 2);
    CHECK(v.id("b") == 3);

    Vocab m = Vocab::build(corpus, 10, 2);
    CHECK(m.size() == 3);
    CHECK_FALSE(m.contains("b"));
    CHECK(m.id("b") == Vocab::kUnk);
}

TEST_CASE("vocab tie rule and cap") {
    const std::vector<Tokens> corpus{{"zeta", "alpha", "mid", "mid"}};
    Vocab v = Vocab::build(corpus, 10);
    CHECK(v.id("mid") == 2);
    CHECK(v.id("alpha") == 3);
    CHECK(v.id("zeta") == 4);
    Vocab capped = Vocab::build(corpus, 3);
    CHECK(capped.size() == 3);
    CHECK(capped.contains("mid"));
    CHECK_THROWS_AS(Vocab::build(corpus, 1), ConfigError);
}

TEST_CASE("vocab build is deterministic and hash tracks content") {
    const std::vector<Tokens> corpus{tokenize("the cat sat on the mat"), tokenize("the dog")};
    Vocab a = Vocab::build(corpus, 100), b = Vocab::build(corpus, 100);
    CHECK(a.tokens() == b.tokens());
    CHECK(a.hash() == b.hash());
    Vocab c = Vocab::build(corpus, 4);
    CHECK(a.hash() != c.hash());
    CHECK(a.hash_hex().size() == 16);
}

TEST_CASE("encode keeps the front, ids stay in range") {
    const std::vector<Tokens> corpus{tokenize("a b c d")};
    Vocab v = Vocab::build(corpus, 10);
    const Tokens input{"a", "zzz", "c", "d"};
    const auto ids = v.encode(input, 3);
    REQUIRE(ids.size() == 3);
    CHECK(ids[0] == v.id("a"));
    CHECK(ids[1] == Vocab::kUnk);
    for (auto id : ids) CHECK(static_cast<std::size_t>(id) < v.size());
    CHECK(v.encode(Tokens{}, 5) == std::vector<std::int64_t>{Vocab::kUnk});
}

TEST_CASE("vocab constructor enforces reserved slots") {
    CHECK_THROWS(Vocab({"x", "<unk>"}));
    CHECK_THROWS(Vocab({"<pad>", "<unk>", "a", "a"}));
}
