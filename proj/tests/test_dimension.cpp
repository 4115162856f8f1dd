#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace univoque;
using testutil::contains_decimal;
using testutil::mid;

namespace {

struct Fixture {
    PlateauTree tree;
    EntropyEvaluator entropy;
    DimensionContext ctx;
    const PlateauNode* J;  // the 1110 node

    static PlateauTree make_tree() {
        PlateauTree::Options opt;
        opt.M = 1;
        opt.max_word_len = 4;
        opt.max_ref_len = 8;
        opt.levels = 1;
        opt.precision_bits = 128;
        return PlateauTree::build(opt);
    }

    Fixture() : tree(make_tree()), entropy(tree), ctx(tree, entropy, 8), J(tree.find({2})) {}
};

const Rational kTol(1, 1000000);

}  // namespace

TEST_CASE("local dimension at the top base") {
    Fixture f;
    auto top = base_from_alpha(DigitSeq::periodic(Word(Alphabet(1), {1})), 128);
    auto l = local_dim(f.ctx, top, Side::Left, kTol);
    CHECK(l.value.is_point());
    CHECK(l.value.lo == 1);
    auto r = local_dim(f.ctx, top, Side::Right, kTol);
    CHECK(r.value.hi == 0);
    auto t = local_dim(f.ctx, top, Side::TwoSided, kTol);
    CHECK(t.value.lo == 1);
}

TEST_CASE("local dimension vanishes exactly at complement-doubling points") {
    Fixture f;
    auto d = local_dim(f.ctx, *f.J->q_c, Side::TwoSided, kTol);
    CHECK(d.value.hi == 0);
    CHECK(d.basis == DimValue::Basis::Zero);
    // and at the smallest univoque base
    auto dk = local_dim(f.ctx, f.tree.komornik_loreti_base(), Side::TwoSided, kTol);
    CHECK(dk.value.hi == 0);
}

TEST_CASE("endpoint formulas at a pulled-back child") {
    // the child of 1110 from reference word 110: left/right local dimensions
    // at its right endpoint follow the closed forms log2/(mk log q) and
    // log(golden)/(m log q)
    Fixture f;
    PlateauNode child = make_pullback_child(*f.J, Word(Alphabet(1), {1, 1, 0}), 7, 128);
    auto fm = local_dim(f.ctx, child.q_R, Side::Left, kTol);
    auto fp = local_dim(f.ctx, child.q_R, Side::Right, kTol);
    CHECK(contains_decimal(fm.value, "0.0875998928", 1e-8));
    CHECK(contains_decimal(fp.value, "0.1824465517", 1e-8));
    CHECK(fm.value.hi < fp.value.lo);  // strictly smaller from the left
    auto ft = local_dim(f.ctx, child.q_R, Side::TwoSided, kTol);
    CHECK(std::abs(mid(ft.value) - mid(fp.value)) < 1e-12);
}

TEST_CASE("two-sided dimension is the maximum of the one-sided ones") {
    Fixture f;
    std::vector<BaseEnclosure> qs{*f.J->q_c, f.J->q_L, f.J->q_R,
                                  BaseEnclosure::from_rational(Alphabet(1), Rational(193, 100))};
    for (const auto& q : qs) {
        auto l = local_dim(f.ctx, q, Side::Left, kTol);
        auto r = local_dim(f.ctx, q, Side::Right, kTol);
        auto t = local_dim(f.ctx, q, Side::TwoSided, kTol);
        CHECK(t.value.hi >= std::max(l.value.lo, r.value.lo) - Rational(1, 1000000000));
        CHECK(t.value.lo <= std::max(l.value.hi, r.value.hi) + Rational(1, 1000000000));
    }
}

TEST_CASE("left endpoints have positive left dimension and zero right dimension") {
    Fixture f;
    auto fm = local_dim(f.ctx, f.J->q_L, Side::Left, kTol);
    CHECK(fm.value.lo > 0);
    auto fp = local_dim(f.ctx, f.J->q_L, Side::Right, kTol);
    CHECK(fp.value.hi == 0);
    CHECK(fp.basis == DimValue::Basis::Zero);
}

TEST_CASE("interval dimension") {
    Fixture f;
    SECTION("full plateau gives log2/(m log q_R)") {
        auto d = interval_dim(f.ctx, f.J->q_L, f.J->q_R, kTol);
        CHECK(contains_decimal(d.value, "0.2627991994", 1e-6));
        CHECK(d.value.width() < Rational(1, 100000));
    }
    SECTION("inside a null interval the dimension is exactly zero") {
        auto a = BaseEnclosure::from_rational(Alphabet(1), rational_from_decimal("1.9280"));
        auto b = BaseEnclosure::from_rational(Alphabet(1), rational_from_decimal("1.9330"));
        auto d = interval_dim(f.ctx, a, b, kTol);
        CHECK(d.value.hi == 0);
        CHECK(d.basis == DimValue::Basis::Zero);
    }
    SECTION("monotone under interval inclusion") {
        auto d_small = interval_dim(f.ctx, *f.J->q_c, f.J->q_R, kTol);
        auto d_big = interval_dim(
            f.ctx, BaseEnclosure::from_rational(Alphabet(1), rational_from_decimal("1.8")),
            base_from_alpha(DigitSeq::periodic(Word(Alphabet(1), {1})), 128), kTol);
        CHECK(d_small.value.lo <= d_big.value.hi + kTol);
    }
    SECTION("order of ends is enforced") {
        CHECK_THROWS(interval_dim(f.ctx, f.J->q_R, f.J->q_L, kTol));
    }
}

TEST_CASE("relative bifurcation set dimensions") {
    Fixture f;
    auto bd = bifurcation_dims(*f.J, 128);
    SECTION("formula identity") {
        // dim_B * (m log q_R) = log 2 by construction
        RationalInterval lqR = log_enclosure(f.J->q_R.interval);
        RationalInterval prod = bd.dim_B.value * (Rational(4) * lqR);
        CHECK(prod.lo <= log_enclosure(Rational(2)).hi);
        CHECK(prod.hi >= log_enclosure(Rational(2)).lo);
    }
    SECTION("p0 equals the right endpoint of the length-3m child") {
        PlateauNode child = make_pullback_child(*f.J, Word(Alphabet(1), {1, 1, 0}), 7, 128);
        CHECK(compare_bases(bd.p0, child.q_R) == Ordering::Equal);
        CHECK(std::abs(mid(bd.p0.interval) - mid(child.q_R.interval)) < 1e-9);
    }
    SECTION("the excess part is strictly smaller") {
        CHECK(bd.dim_excess.value.hi < bd.dim_B.value.lo);
    }
}

TEST_CASE("relative staircase in the symbolic metric") {
    Fixture f;
    SECTION("zero through the complement-doubling point") {
        auto d = dj_function(f.ctx, *f.J, *f.J->q_F, kTol);
        CHECK(d.value.hi == 0);
        auto dc = dj_function(f.ctx, *f.J, *f.J->q_c, kTol);
        CHECK(dc.value.hi == 0);
    }
    SECTION("1/m at the right endpoint") {
        auto d = dj_function(f.ctx, *f.J, f.J->q_R, kTol);
        CHECK(std::abs(mid(d.value) - 0.25) < 1e-9);
    }
    SECTION("nondecreasing on a grid") {
        Rational lo = f.J->q_L.interval.hi, hi = f.J->q_R.interval.lo;
        Rational prev(-1);
        for (int i = 1; i <= 40; ++i) {
            Rational q = lo + (hi - lo) * Rational(i, 40);
            auto d = dj_function(f.ctx, *f.J,
                                 BaseEnclosure::from_rational(Alphabet(1), q), Rational(1, 1000));
            CHECK(d.value.hi + Rational(1, 1000) >= prev);
            prev = d.value.lo;
        }
    }
}

TEST_CASE("dimension of the difference set") {
    Fixture f;
    // at the top base the left dimension is 1
    auto top = base_from_alpha(DigitSeq::periodic(Word(Alphabet(1), {1})), 128);
    CHECK(dim_W(f.ctx, top, kTol).value.lo == 1);
    // vanishes at complement-doubling points
    CHECK(dim_W(f.ctx, *f.J->q_c, kTol).value.hi == 0);
    // vanishes outside the closure of the univoque set
    auto inside_null = BaseEnclosure::from_rational(Alphabet(1), rational_from_decimal("1.7"));
    CHECK(dim_W(f.ctx, inside_null, kTol).value.hi == 0);
}

TEST_CASE("symbolic to euclidean conversion") {
    Fixture f;
    DimValue zero{RationalInterval(Rational(0)), DimValue::Basis::Zero, ""};
    CHECK(symbolic_to_euclidean(zero, f.J->q_R).value.hi == 0);
    // at base 2 the conversion is the identity
    auto two = BaseEnclosure::from_rational(Alphabet(1), Rational(2));
    DimValue half{RationalInterval(Rational(1, 2)), DimValue::Basis::ExactFormula, ""};
    auto conv = symbolic_to_euclidean(half, two);
    CHECK(std::abs(mid(conv.value) - 0.5) < 1e-12);
}

TEST_CASE("discontinuity pattern at plateau right endpoints") {
    // midpoints of the null intervals of children accumulate below q_R while
    // carrying zero local dimension; the endpoint itself has positive f
    Fixture f;
    std::vector<Word> refs = enumerate_level1_words(Alphabet(1), 7);
    int checked = 0;
    for (size_t i = refs.size(); i-- > 0 && checked < 3;) {
        PlateauNode child = make_pullback_child(*f.J, refs[i], static_cast<int>(i + 1), 96);
        Rational mid_null = (child.q_L.interval.hi + child.q_c->interval.lo) / 2;
        auto d = local_dim(f.ctx, BaseEnclosure::from_rational(Alphabet(1), mid_null),
                           Side::TwoSided, kTol);
        CHECK(d.value.hi == 0);
        ++checked;
    }
    auto at_end = local_dim(f.ctx, f.J->q_R, Side::TwoSided, kTol);
    CHECK(at_end.value.lo > 0);
}

TEST_CASE("local dimension never exceeds the dimension of the univoque set at q") {
    Fixture f;
    for (const char* dec : {"1.93", "1.95", "1.84", "1.88"}) {
        auto q = BaseEnclosure::from_rational(Alphabet(1), rational_from_decimal(dec));
        auto fq = local_dim(f.ctx, q, Side::TwoSided, Rational(1, 1000));
        auto h = f.entropy.entropy_H(q, Rational(1, 1000));
        RationalInterval dim_uq = h.value / log_enclosure(q.interval);
        CHECK(fq.value.lo <= dim_uq.hi + Rational(1, 1000));
    }
}

TEST_CASE("first-level endpoint equality in the documented exceptional case") {
    // for an odd alphabet bound M = 2j+1 and the single-letter generator
    // j+1, the left and right local dimensions agree at the right endpoint
    PlateauTree::Options opt;
    opt.M = 3;
    opt.max_word_len = 2;
    opt.max_ref_len = 6;
    opt.levels = 1;
    opt.precision_bits = 128;
    PlateauTree tree = PlateauTree::build(opt);
    EntropyEvaluator entropy(tree);
    DimensionContext ctx(tree, entropy, 6);
    const PlateauNode* J = nullptr;
    for (const PlateauNode* n : tree.children({}))
        if (!n->is_null && n->generating_word->to_string() == "2") J = n;
    REQUIRE(J);
    Rational tol(1, 1000000);
    auto fm = local_dim(ctx, J->q_R, Side::Left, tol);
    auto fp = local_dim(ctx, J->q_R, Side::Right, tol);
    // both sides evaluate to log 2 / log q_R here
    CHECK(std::abs(mid(fm.value) - mid(fp.value)) < 1e-9);
    CHECK(fm.value.lo > 0);
}

TEST_CASE("larger alphabets: endpoint formulas inside an M=2 plateau") {
    // node generated by 21 over {0,1,2}; its child from reference word 110
    // has right-endpoint dimensions log2/(2k log p0) and log(golden)/(2 log p0)
    PlateauTree::Options opt;
    opt.M = 2;
    opt.max_word_len = 3;
    opt.max_ref_len = 6;
    opt.levels = 1;
    opt.precision_bits = 128;
    PlateauTree tree = PlateauTree::build(opt);
    EntropyEvaluator entropy(tree);
    DimensionContext ctx(tree, entropy, 6);
    const PlateauNode* J = nullptr;
    for (const PlateauNode* n : tree.children({}))
        if (!n->is_null && n->generating_word->to_string() == "21") J = n;
    REQUIRE(J);
    PlateauNode child = make_pullback_child(*J, Word(Alphabet(1), {1, 1, 0}), 1, 128);
    CHECK(child.generating_word->to_string() == "220100");
    Rational tol(1, 1000000);
    auto fm = local_dim(ctx, child.q_R, Side::Left, tol);
    auto fp = local_dim(ctx, child.q_R, Side::Right, tol);
    double p0 = child.q_R.interval.mid().get_d();
    CHECK(std::abs(mid(fm.value) - std::log(2.0) / (6 * std::log(p0))) < 1e-8);
    CHECK(std::abs(mid(fp.value) - std::log((1 + std::sqrt(5.0)) / 2) / (2 * std::log(p0))) <
          1e-8);
    CHECK(fm.value.hi < fp.value.lo);
    // the bifurcation closed form agrees with the child endpoint here too
    auto bd = bifurcation_dims(*J, 128);
    CHECK(compare_bases(bd.p0, child.q_R) == Ordering::Equal);
}

TEST_CASE("empirical continuity exponent of the induced map is positive") {
    Fixture f;
    double e1 = holder_exponent_estimate(*f.J->q_G, *f.J->q_F, *f.J, 96);
    double e2 = holder_exponent_estimate(*f.J->q_F, *f.J->q_c, *f.J, 96);
    CHECK(e1 > 0);
    CHECK(e2 > 0);
}

TEST_CASE("base serialization carries the defining sequence") {
    Fixture f;
    std::string s = f.J->q_L.serialized();
    CHECK(s.find("per(1110)") != std::string::npos);
    CHECK(s.find("±") != std::string::npos);
}

TEST_CASE("depth budget degrades to a vanishing upper bound") {
    // a complement-doubling point of a level-2 child: with a generous budget
    // the descent certifies the exact zero; with the budget cut at two
    // levels it reports containment with the log2/(l log q_R) upper bound
    Fixture f;
    PlateauNode child = make_pullback_child(*f.J, Word(Alphabet(1), {1, 1, 0}), 7, 128);
    BaseEnclosure deep_qc = *child.q_c;

    auto exact = local_dim(f.ctx, deep_qc, Side::TwoSided, kTol);
    CHECK(exact.value.hi == 0);
    CHECK(exact.basis == DimValue::Basis::Zero);

    DimensionContext shallow(f.tree, f.entropy, 2);
    auto capped = local_dim(shallow, deep_qc, Side::Left, kTol);
    CHECK(capped.basis == DimValue::Basis::Zero);
    CHECK(capped.value.lo == 0);
    CHECK(capped.value.hi > 0);  // honest: only an upper bound at this depth
    RationalInterval bound = log_enclosure(Rational(2)) /
                             (Rational(child.word_length()) * log_enclosure(child.q_R.interval));
    CHECK(capped.value.hi <= bound.hi + Rational(1, 1000000000));
    CHECK(capped.witness.find("depth budget") != std::string::npos);
}

TEST_CASE("window scans for the strongly univoque condition") {
    Fixture f;
    Word a = *f.J->generating_word;
    Word ap = a.incremented_last();

    SECTION("the expansion itself matches at position zero") {
        auto rep = strongly_univoque_scan(f.J->q_R, *f.J->q_R.defining_seq, 60, 8);
        CHECK(rep.verdict == StronglyUnivoqueReport::Verdict::InWCandidate);
        REQUIRE(!rep.window_hits.empty());
        CHECK(rep.window_hits.front().first == 0);
    }
    SECTION("the periodic survivor deep inside the plateau has bounded matches") {
        auto x = DigitSeq::periodic(ap.concat(ap.complement()));
        auto rep = strongly_univoque_scan(*f.J->q_c, x, 120, 16);
        CHECK(rep.verdict == StronglyUnivoqueReport::Verdict::InUcheck);
    }
    SECTION("the same survivor at a rational base strictly between q_G and q_F") {
        auto x = DigitSeq::periodic(ap.concat(ap.complement()));
        auto q = BaseEnclosure::from_rational(Alphabet(1), rational_from_decimal("1.9333"));
        REQUIRE(compare_bases(*f.J->q_G, q) == Ordering::Less);
        REQUIRE(compare_bases(q, *f.J->q_F) == Ordering::Less);
        auto rep = strongly_univoque_scan(q, x, 120, 16);
        CHECK(rep.verdict == StronglyUnivoqueReport::Verdict::InUcheck);
    }
    SECTION("violations are excluded with a witness") {
        auto x = DigitSeq::periodic(Word(Alphabet(1), {1}));
        auto rep = strongly_univoque_scan(*f.J->q_G, x, 40, 4);
        CHECK(rep.verdict == StronglyUnivoqueReport::Verdict::Excluded);
    }
}
