#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace univoque;
using testutil::all_words;

TEST_CASE("lexicographic comparison of digit sequences") {
    Alphabet one(1);
    auto per = [&](std::vector<int> d) { return DigitSeq::periodic(Word(one, std::move(d))); };

    SECTION("first difference decides") {
        auto x = per({1, 0});          // 101010...
        auto y = per({1, 1, 0, 1});    // 110111011101...
        auto r = lex_compare(x, y);
        CHECK(r.kind == LexResult::Less);
        CHECK(r.diff_index == 2);
    }
    SECTION("identical closed forms are equal") {
        CHECK(lex_compare(per({1, 0}), per({1, 0})).kind == LexResult::Equal);
        CHECK(lex_compare(per({1, 0}), per({1, 0, 1, 0})).kind == LexResult::Equal);
    }
    SECTION("prefixed copy is greater") {
        auto x = DigitSeq::eventually_periodic(Word(one, {1}), Word(one, {1, 0}));  // 1101010...
        auto r = lex_compare(x, per({1, 0}));
        CHECK(r.kind == LexResult::Greater);
        CHECK(r.diff_index == 2);
    }
    SECTION("alphabet mismatch is an error") {
        CHECK_THROWS_AS(lex_compare(per({1, 0}), DigitSeq::periodic(Word(Alphabet(2), {1, 0}))),
                        AlphabetMismatch);
    }
}

TEST_CASE("complement, increment, decrement") {
    Alphabet one(1), two(2);
    CHECK(Word(one, {1, 1, 0, 1}).complement().to_string() == "0010");
    CHECK(Word(two, {2, 1, 0}).complement().to_string() == "012");
    Word w(two, {1, 0, 2, 1});
    CHECK(w.complement().complement() == w);

    CHECK(Word(one, {1, 1, 0}).incremented_last().to_string() == "111");
    CHECK(Word(one, {1, 1, 1}).decremented_last().to_string() == "110");
    CHECK_THROWS_AS(Word(one, {1, 1, 1}).incremented_last(), BoundaryDigit);
    CHECK_THROWS_AS(Word(one, {1, 1, 0}).decremented_last(), BoundaryDigit);
}

TEST_CASE("complement reverses lexicographic order") {
    std::mt19937_64 rng(20240811);
    Alphabet two(2);
    for (int trial = 0; trial < 200; ++trial) {
        Word x = testutil::random_word(rng, two, 6);
        Word y = testutil::random_word(rng, two, 6);
        if (x == y) continue;
        bool xy = x < y;
        CHECK((y.complement() < x.complement()) == xy);
    }
}

TEST_CASE("thue-morse bits") {
    int expect0[8] = {0, 1, 1, 0, 1, 0, 0, 1};
    int expect8[8] = {1, 0, 0, 1, 0, 1, 1, 0};
    for (int i = 0; i < 8; ++i) {
        CHECK(thue_morse(i) == expect0[i]);
        CHECK(thue_morse(8 + i) == expect8[i]);
    }
    for (unsigned long i = 0; i <= 10000; ++i) {
        CHECK(thue_morse(2 * i) == thue_morse(i));
        CHECK(thue_morse(2 * i + 1) == 1 - thue_morse(i));
    }
}

TEST_CASE("lambda digits of the smallest univoque base") {
    CHECK(lambda_prefix(Alphabet(1), 16).to_string() == "1101001100101101");
    CHECK(lambda_prefix(Alphabet(2), 7).to_string() == "2102012");
    CHECK(lambda_prefix(Alphabet(3), 1)[0] == 2);

    // for M = 1 the digits are the shifted Thue-Morse bits
    Word l = lambda_prefix(Alphabet(1), 64);
    for (long i = 0; i < 64; ++i) CHECK(l[i] == thue_morse(static_cast<unsigned long>(i + 1)));
}

TEST_CASE("lambda equals the complement-doubling sequence of its seed") {
    // M = 1: seed 10;  M = 2k: seed k;  M = 2k+1 >= 3: seed (k+1)k
    auto check_agree = [](DigitSeq a, DigitSeq b, long n) {
        for (long i = 1; i <= n; ++i) REQUIRE(a.digit_at(i) == b.digit_at(i));
    };
    check_agree(DigitSeq::thue_morse_lambda(Alphabet(1)),
                DigitSeq::dvk_doubling(Word(Alphabet(1), {1, 0})), 256);
    check_agree(DigitSeq::thue_morse_lambda(Alphabet(2)),
                DigitSeq::dvk_doubling(Word(Alphabet(2), {1})), 256);
    check_agree(DigitSeq::thue_morse_lambda(Alphabet(3)),
                DigitSeq::dvk_doubling(Word(Alphabet(3), {2, 1})), 256);
    check_agree(DigitSeq::thue_morse_lambda(Alphabet(4)),
                DigitSeq::dvk_doubling(Word(Alphabet(4), {2})), 256);
}

TEST_CASE("shift keeps closed forms") {
    Alphabet one(1);
    auto x = DigitSeq::periodic(Word(one, {1, 0}));
    CHECK(lex_compare(x.shifted(1), DigitSeq::periodic(Word(one, {0, 1}))).kind ==
          LexResult::Equal);
    CHECK(lex_compare(x.shifted(0), x).kind == LexResult::Equal);
    CHECK(lex_compare(x.shifted(2), x).kind == LexResult::Equal);

    auto y = DigitSeq::eventually_periodic(Word(one, {1, 1, 1}), Word(one, {0, 1}));
    auto f = y.shifted(4).eventually_periodic_form();
    REQUIRE(f.has_value());
    CHECK(f->preamble.empty());
    CHECK(f->period == std::vector<int>{1, 0});
}

TEST_CASE("strict total order on distinct eventually periodic sequences") {
    std::mt19937_64 rng(7);
    Alphabet two(2);
    auto random_seq = [&]() {
        int plen = 1 + static_cast<int>(rng() % 3);
        int slen = static_cast<int>(rng() % 3);
        Word per = testutil::random_word(rng, two, plen);
        if (slen == 0) return DigitSeq::periodic(per);
        return DigitSeq::eventually_periodic(testutil::random_word(rng, two, slen), per);
    };
    for (int trial = 0; trial < 300; ++trial) {
        DigitSeq a = random_seq(), b = random_seq(), c = random_seq();
        auto ab = lex_compare(a, b), ba = lex_compare(b, a);
        REQUIRE(ab.kind != LexResult::Undecided);
        // antisymmetry
        if (ab.kind == LexResult::Less) CHECK(ba.kind == LexResult::Greater);
        if (ab.kind == LexResult::Greater) CHECK(ba.kind == LexResult::Less);
        if (ab.kind == LexResult::Equal) CHECK(ba.kind == LexResult::Equal);
        // transitivity
        auto bc = lex_compare(b, c), ac = lex_compare(a, c);
        if (ab.kind == LexResult::Less && bc.kind == LexResult::Less)
            CHECK(ac.kind == LexResult::Less);
        if (ab.kind == LexResult::Greater && bc.kind == LexResult::Greater)
            CHECK(ac.kind == LexResult::Greater);
    }
}

TEST_CASE("word serialization") {
    CHECK(Word(Alphabet(1), {1, 1, 0, 1}).to_string() == "1101");
    CHECK(Word(Alphabet(12), {10, 2, 0}).to_string() == "10,2,0");
    CHECK(Word::parse(Alphabet(1), "1101") == Word(Alphabet(1), {1, 1, 0, 1}));
    CHECK(Word::parse(Alphabet(12), "10,2,0") == Word(Alphabet(12), {10, 2, 0}));
    CHECK_THROWS_AS(Word::parse(Alphabet(1), "1x0"), ParseError);
}

TEST_CASE("finite sequences act as prefixes only") {
    Alphabet one(1);
    auto f = DigitSeq::finite(Word(one, {1, 0, 1}));
    CHECK(f.digit_at(3) == 1);
    CHECK_THROWS(f.digit_at(4));
    CHECK(f.finite_length() == 3);
    CHECK(f.shifted(1).finite_length() == 2);
}

TEST_CASE("dvk doubling digits") {
    Alphabet one(1);
    // theta for seed 1110: blocks 1111 / 0001 / 00001111 ...
    auto t = DigitSeq::dvk_doubling(Word(one, {1, 1, 1, 0}));
    CHECK(t.prefix(16).to_string() == "1111000100001111");
    // base case: the first block is the incremented seed
    auto u = DigitSeq::dvk_doubling(Word(Alphabet(2), {2, 1, 0}));
    CHECK(u.prefix(3).to_string() == "211");
}
