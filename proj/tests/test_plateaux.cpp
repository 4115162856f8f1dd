#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace univoque;
using testutil::contains_decimal;

TEST_CASE("admissible words") {
    Alphabet one(1), two(2);
    CHECK(is_admissible(Word(two, {1})));
    CHECK(is_admissible(Word(one, {1, 0})));
    CHECK_FALSE(is_admissible(Word(one, {1, 1})));
    CHECK(is_admissible(Word(one, {1, 1, 1, 0})));
    // single letters need M >= 2
    CHECK_FALSE(is_admissible(Word(one, {1})));
    CHECK_FALSE(is_admissible(Word(two, {2})));  // last digit must stay below M
    CHECK_FALSE(is_admissible(Word(two, {0})));
}

TEST_CASE("word-followed-by-complement shape") {
    Alphabet one(1);
    CHECK(is_ss_bar_form(Word(one, {1, 0})));
    CHECK(is_ss_bar_form(Word(one, {1, 1, 0, 0})));
    CHECK_FALSE(is_ss_bar_form(Word(one, {1, 1, 0})));
    CHECK_FALSE(is_ss_bar_form(Word(one, {1, 1, 0, 1})));
}

TEST_CASE("basic intervals") {
    Alphabet one(1), two(2);
    SECTION("golden interval for 10") {
        auto [qL, qR] = basic_interval(Word(one, {1, 0}), 128);
        CHECK(contains_decimal(qL.interval, "1.6180339887", 1e-9));
        CHECK(qL.interval.certainly_less(qR.interval));
    }
    SECTION("1110 generates the interval at the fourth multinacci base") {
        auto [qL, qR] = basic_interval(Word(one, {1, 1, 1, 0}), 128);
        CHECK(contains_decimal(qL.interval, "1.92756", 1e-5));
        CHECK(contains_decimal(qR.interval, "1.9336097565", 1e-9));
    }
    SECTION("M=2 single-letter interval") {
        auto [qL, qR] = basic_interval(Word(two, {1}), 128);
        CHECK(qL.is_point());
        CHECK(qL.interval.lo == 2);
        // alpha(q_R) = 2 1^inf, the root of q^2 - 3q + 1
        CHECK(contains_decimal(qR.interval, "2.6180339887", 1e-9));
    }
    SECTION("inadmissible words are rejected") {
        CHECK_THROWS_AS(basic_interval(Word(one, {1, 1}), 64), NotAdmissible);
    }
}

TEST_CASE("complement-doubling sequences") {
    Alphabet one(1);
    CHECK(dvk_sequence(Word(one, {1, 1, 1, 0}), 16).to_string() == "1111000100001111");
    // the first block is the incremented seed
    CHECK(dvk_sequence(Word(one, {1, 1, 1, 0}), 4).to_string() == "1111");
    // seed 10 reproduces the digits of the smallest univoque base
    CHECK(dvk_sequence(Word(one, {1, 0}), 8).to_string() == "11010011");

    // every doubling sequence is a valid expansion whose base is interior
    for (int M = 1; M <= 2; ++M) {
        Alphabet a(M);
        for (int len = 1; len <= 5; ++len) {
            for (const Word& w : testutil::all_words(a, len)) {
                if (!is_admissible(w)) continue;
                DigitSeq theta = DigitSeq::dvk_doubling(w);
                REQUIRE(is_valid_alpha(theta, 512).verdict == Validity::Yes);
                auto [qL, qR] = basic_interval(w, 96);
                BaseEnclosure qc = base_from_alpha(theta, 96);
                REQUIRE(compare_bases(qL, qc) == Ordering::Less);
                REQUIRE(compare_bases(qc, qR) == Ordering::Less);
            }
        }
    }
}

TEST_CASE("special points are ordered inside the interval") {
    for (int M = 1; M <= 2; ++M) {
        Alphabet a(M);
        for (int len = 1; len <= 6; ++len) {
            for (const Word& w : testutil::all_words(a, len)) {
                if (!is_admissible(w)) continue;
                auto [qL, qR] = basic_interval(w, 96);
                SpecialPoints sp = special_points(w, 96);
                REQUIRE(compare_bases(qL, sp.q_G) == Ordering::Less);
                REQUIRE(compare_bases(sp.q_G, sp.q_F) == Ordering::Less);
                REQUIRE(compare_bases(sp.q_F, sp.q_c) == Ordering::Less);
                REQUIRE(compare_bases(sp.q_c, qR) == Ordering::Less);
            }
        }
    }
}

TEST_CASE("reference special points of the 1110 interval") {
    Alphabet one(1);
    SpecialPoints sp = special_points(Word(one, {1, 1, 1, 0}), 128);
    PlateauNode node = make_level1_node(Word(one, {1, 1, 1, 0}), 1, 128);
    auto g = phi_hat(*node.q_G, node, 128);
    auto f = phi_hat(*node.q_F, node, 128);
    auto c = phi_hat(*node.q_c, node, 128);
    CHECK(contains_decimal(g.interval, "1.61803", 1e-5));
    CHECK(contains_decimal(f.interval, "1.75488", 1e-5));
    CHECK(contains_decimal(c.interval, "1.78723", 1e-5));
}

TEST_CASE("level-1 enumeration") {
    Alphabet one(1);
    SECTION("short horizons") {
        CHECK(enumerate_level1_words(one, 2).empty());
        auto w3 = enumerate_level1_words(one, 3);
        REQUIRE(w3.size() == 1);
        CHECK(w3[0].to_string() == "110");
        auto w4 = enumerate_level1_words(one, 4);
        REQUIRE(w4.size() == 2);
        CHECK(w4[0].to_string() == "110");
        CHECK(w4[1].to_string() == "1110");
    }
    SECTION("windowed enumeration") {
        auto nodes = enumerate_level1(one, 4,
                                      RationalInterval(rational_from_decimal("1.9"),
                                                       rational_from_decimal("2.0")),
                                      96);
        REQUIRE(nodes.size() == 1);
        CHECK(nodes[0].generating_word->to_string() == "1110");
    }
    SECTION("returned intervals are pairwise disjoint and sorted") {
        auto nodes = enumerate_level1(one, 6, std::nullopt, 96);
        for (size_t i = 0; i + 1 < nodes.size(); ++i)
            REQUIRE(compare_bases(nodes[i].q_R, nodes[i + 1].q_L) == Ordering::Less);
    }
}

TEST_CASE("level-1 enumeration agrees with a numeric brute-force oracle") {
    // independent route: numeric comparisons against the smallest univoque
    // base and numeric interval containment, no lexicographic machinery
    Alphabet one(1);
    BaseEnclosure qkl = komornik_loreti(one, 160);
    struct Cand {
        Word w;
        BaseEnclosure qL, qR;
    };
    std::vector<Cand> cands;
    for (int len = 1; len <= 8; ++len) {
        for (const Word& w : testutil::all_words(one, len)) {
            if (!is_admissible(w)) continue;
            auto [qL, qR] = basic_interval(w, 160);
            if (!(qL.interval.lo > qkl.interval.hi)) continue;  // not right of q_KL
            cands.push_back({w, qL, qR});
        }
    }
    std::vector<Word> expected;
    for (const Cand& c : cands) {
        bool contained = false;
        for (const Cand& d : cands) {
            if (c.w == d.w) continue;
            bool inside = d.qL.interval.hi <= c.qL.interval.lo + pow2(-100) &&
                          c.qR.interval.hi <= d.qR.interval.hi + pow2(-100);
            if (!inside) continue;
            // equal intervals (same expansion forms) dedupe to the shorter word
            bool equal = compare_bases(c.qL, d.qL) == Ordering::Equal &&
                         compare_bases(c.qR, d.qR) == Ordering::Equal;
            if (!equal || d.w.size() < c.w.size()) contained = true;
            if (contained) break;
        }
        if (!contained) expected.push_back(c.w);
    }
    std::sort(expected.begin(), expected.end(), [](const Word& a, const Word& b) {
        auto qa = basic_interval(a, 96).first, qb = basic_interval(b, 96).first;
        return qa.interval.hi < qb.interval.lo;
    });

    auto got = enumerate_level1_words(one, 8);
    REQUIRE(got.size() == expected.size());
    for (size_t i = 0; i < got.size(); ++i) REQUIRE(got[i] == expected[i]);
    CHECK(got.size() == 32);

    // no enumerated generator has the word-followed-by-complement shape
    for (const Word& w : got) CHECK_FALSE(is_ss_bar_form(w));
}

TEST_CASE("plateau tree structure") {
    PlateauTree::Options opt;
    opt.M = 1;
    opt.max_word_len = 4;
    opt.max_ref_len = 4;
    opt.levels = 2;
    opt.precision_bits = 96;
    PlateauTree tree = PlateauTree::build(opt);

    SECTION("root and null child") {
        auto kids = tree.children({});
        REQUIRE(kids.size() == 3);  // null + 110 + 1110
        CHECK(kids[0]->is_null);
        CHECK(compare_bases(kids[0]->q_R, tree.komornik_loreti_base()) == Ordering::Equal);
        CHECK(kids[1]->generating_word->to_string() == "110");
        CHECK(kids[2]->generating_word->to_string() == "1110");
    }
    SECTION("children: null first, then pullbacks with admissible words") {
        const PlateauNode* J = tree.find({2});
        REQUIRE(J);
        auto kids = tree.children(J->path);
        REQUIRE(kids.size() >= 3);
        CHECK(kids[0]->is_null);
        long m = J->word_length();
        for (size_t i = 1; i < kids.size(); ++i) {
            const PlateauNode* c = kids[i];
            REQUIRE(c->generating_word);
            CHECK(is_admissible(*c->generating_word));
            CHECK(c->word_length() % m == 0);
            CHECK(c->word_length() >= 3 * m);
            // children lie inside [q_c, q_R]
            CHECK(compare_bases(c->q_L, *J->q_c) != Ordering::Less);
            CHECK(compare_bases(c->q_R, J->q_R) != Ordering::Greater);
        }
        // the length-3m child has the canonical generating word
        Word want = J->generating_word->incremented_last()
                        .concat(J->generating_word->complement())
                        .concat(J->generating_word->incremented_last().complement());
        bool found = false;
        for (size_t i = 1; i < kids.size(); ++i)
            if (*kids[i]->generating_word == want) found = true;
        CHECK(found);
    }
    SECTION("siblings are disjoint and contained in the parent") {
        for (const PlateauNode* n : tree.all_nodes()) {
            auto kids = tree.children(n->path);
            for (size_t i = 0; i + 1 < kids.size(); ++i)
                REQUIRE(compare_bases(kids[i]->q_R, kids[i + 1]->q_L) != Ordering::Greater);
            for (const PlateauNode* c : kids) {
                REQUIRE(compare_bases(n->q_L, c->q_L) != Ordering::Greater);
                REQUIRE(compare_bases(c->q_R, n->q_R) != Ordering::Greater);
            }
        }
    }
}

TEST_CASE("standalone child enumeration matches the tree") {
    PlateauTree::Options opt;
    opt.M = 1;
    opt.max_word_len = 4;
    opt.max_ref_len = 4;
    opt.levels = 2;
    opt.precision_bits = 96;
    PlateauTree tree = PlateauTree::build(opt);
    const PlateauNode* J = tree.find({2});
    REQUIRE(J);
    auto direct = node_children(*J, 4, 96);
    auto via_tree = tree.children(J->path);
    REQUIRE(direct.size() == via_tree.size());
    for (size_t i = 0; i < direct.size(); ++i) {
        CHECK(direct[i].is_null == via_tree[i]->is_null);
        if (direct[i].generating_word)
            CHECK(*direct[i].generating_word == *via_tree[i]->generating_word);
    }
}

TEST_CASE("smallest containing plateau") {
    PlateauTree::Options opt;
    opt.M = 1;
    opt.max_word_len = 4;
    opt.max_ref_len = 4;
    opt.levels = 1;
    opt.precision_bits = 96;
    PlateauTree tree = PlateauTree::build(opt);
    const PlateauNode* J = tree.find({2});
    REQUIRE(J);

    SECTION("right endpoint under the half-open convention") {
        auto chain = smallest_plateau_containing(tree, J->q_R, EndpointMode::HalfOpenRight);
        REQUIRE(!chain.empty());
        CHECK(chain.back() == J);
    }
    SECTION("right endpoint under the open convention stays at the parent") {
        auto chain = smallest_plateau_containing(tree, J->q_R, EndpointMode::Open);
        REQUIRE(!chain.empty());
        CHECK(chain.back()->path.empty());
    }
    SECTION("midpoint of the null interval lands on the null node") {
        Rational mid = (tree.root().q_L.interval.lo + tree.komornik_loreti_base().interval.lo) / 2;
        auto chain = smallest_plateau_containing(
            tree, BaseEnclosure::from_rational(Alphabet(1), mid), EndpointMode::HalfOpenRight);
        REQUIRE(!chain.empty());
        CHECK(chain.back()->is_null);
    }
}

TEST_CASE("classification") {
    PlateauTree::Options opt;
    opt.M = 1;
    opt.max_word_len = 4;
    opt.max_ref_len = 4;
    opt.levels = 1;
    opt.precision_bits = 96;
    PlateauTree tree = PlateauTree::build(opt);
    Alphabet one(1);

    SECTION("golden ratio: shift hits the complement, so not univoque") {
        auto g = base_from_alpha(DigitSeq::periodic(Word(one, {1, 0})), 96);
        auto c = classify(tree, g);
        CHECK(c.in_U == Validity::No);
        CHECK(c.in_V == Validity::Yes);
        CHECK(c.in_closure_U == Validity::No);  // below the smallest univoque base
    }
    SECTION("top base is univoque") {
        auto top = base_from_alpha(DigitSeq::periodic(Word(one, {1})), 96);
        auto c = classify(tree, top);
        CHECK(c.in_U == Validity::Yes);
        CHECK(c.in_B == Validity::Yes);
    }
    SECTION("complement-doubling point of a node") {
        const PlateauNode* J = tree.find({2});
        auto c = classify(tree, *J->q_c);
        CHECK(c.in_U == Validity::Yes);
        CHECK(c.in_C0 == Validity::Yes);
        CHECK(c.in_B == Validity::No);  // interior of an entropy plateau
    }
    SECTION("U implies V on plateau endpoints") {
        const PlateauNode* J = tree.find({2});
        auto cl = classify(tree, J->q_L);
        CHECK(cl.in_U == Validity::No);  // periodic expansion violates strictness
        CHECK(cl.in_V == Validity::Yes);
        CHECK(cl.in_closure_U == Validity::Yes);
        CHECK(cl.in_B_left == Validity::Yes);
        CHECK(cl.in_B == Validity::No);
        auto cr = classify(tree, J->q_R);
        CHECK(cr.in_B_right == Validity::Yes);
        CHECK(cr.in_U == Validity::Yes);
    }
    SECTION("smallest univoque base") {
        auto c = classify(tree, tree.komornik_loreti_base());
        CHECK(c.in_C0 == Validity::Yes);
        CHECK(c.in_U == Validity::Yes);
        CHECK(c.in_B == Validity::No);
    }
}
