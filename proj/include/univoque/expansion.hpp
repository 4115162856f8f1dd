#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "univoque/numeric.hpp"
#include "univoque/poly.hpp"
#include "univoque/words.hpp"

namespace univoque {

// A base q in (1, M+1] held as a certified rational enclosure, usually
// together with the digit sequence whose pi_q value is 1 at q.  When that
// sequence is eventually periodic we also keep an integer polynomial whose
// sign at q' agrees with sign(pi_{q'}(seq) - 1); its unique root in
// (1, M+1] is the base, which makes every later digit decision exact.
struct BaseEnclosure {
    Alphabet alphabet;
    RationalInterval interval;
    std::optional<DigitSeq> defining_seq;
    std::optional<Poly> sign_poly;
    unsigned precision_bits = kDefaultPrecisionBits;

    BaseEnclosure(Alphabet a, RationalInterval iv)
        : alphabet(a), interval(std::move(iv)) {}

    static BaseEnclosure from_rational(Alphabet a, const Rational& q) {
        if (q <= 1 || q > a.M + 1) throw Error("base must lie in (1, M+1]");
        return BaseEnclosure(a, RationalInterval(q));
    }

    bool is_point() const { return interval.is_point(); }

    std::string to_string() const { return plus_minus_string(interval); }

    // decimal enclosure together with the defining sequence, when present
    std::string serialized() const {
        std::string s = to_string();
        if (defining_seq) s += " alpha=" + defining_seq->describe();
        return s;
    }

    BaseEnclosure refined(unsigned bits) const;

    // Digits of the quasi-greedy expansion of 1 in this base; reads the
    // defining sequence when present, otherwise runs the digit recursion.
    Word alpha_prefix(long n) const;
};

namespace detail {

// U(q) = sum u_i q^{s-i} and A(q) = sum w_j q^{t-j} for the closed form
// pi(q) = U/q^s + A/(q^s (q^t - 1)).
inline Poly int_poly_from_digits(const std::vector<int>& d) {
    std::vector<Rational> c(d.size(), Rational(0));
    for (size_t i = 0; i < d.size(); ++i) c[d.size() - 1 - i] = d[i];
    return Poly(std::move(c));
}

inline RationalInterval pow_interval(const RationalInterval& x, long e) {
    RationalInterval r{Rational(1)};
    for (long i = 0; i < e; ++i) r = r * x;
    return r;
}

}  // namespace detail

inline RationalInterval evaluate_pi_closed(const RationalInterval& q, const EvPeriodic& f) {
    long s = static_cast<long>(f.preamble.size());
    long t = static_cast<long>(f.period.size());
    Poly U = detail::int_poly_from_digits(f.preamble);
    Poly A = detail::int_poly_from_digits(f.period);
    RationalInterval qs = detail::pow_interval(q, s);
    RationalInterval qt = detail::pow_interval(q, t);
    RationalInterval den = qt - RationalInterval(Rational(1));  // q > 1 so positive
    RationalInterval head = s == 0 ? RationalInterval(Rational(0)) : U.eval(q) / qs;
    return head + A.eval(q) / (qs * den);
}

inline RationalInterval evaluate_pi_truncated(const RationalInterval& q, const DigitSeq& x,
                                              long terms) {
    if (terms < 1) throw Error("terms must be >= 1");
    int M = x.alphabet().M;
    RationalInterval inv_q = RationalInterval(Rational(1)) / q;
    RationalInterval p = inv_q;
    RationalInterval sum{Rational(0)};
    for (long i = 1; i <= terms; ++i) {
        int d = x.digit_at(i);
        if (d) sum = sum + p * Rational(d);
        p = p * inv_q;
    }
    // p is now an enclosure of q^-(terms+1); tail is in [0, M q^-terms/(q-1)]
    Rational tail_hi = Rational(M) * (p.hi * q.hi) / (q.lo - 1);
    return {sum.lo, sum.hi + tail_hi};
}

// Interval containing pi_q(x).  Eventually periodic sequences use the exact
// closed form; others a partial sum plus tail bound.
inline RationalInterval evaluate_pi(const BaseEnclosure& q, const DigitSeq& x, long terms) {
    if (x.alphabet() != q.alphabet) throw AlphabetMismatch();
    if (auto f = x.eventually_periodic_form()) return evaluate_pi_closed(q.interval, *f);
    return evaluate_pi_truncated(q.interval, x, terms);
}

// Interval enclosure of M/(q-1), the right endpoint of the representable range.
inline RationalInterval value_range(const BaseEnclosure& q) {
    if (q.interval.lo <= 1) throw Error("base enclosure touches 1");
    Rational M(q.alphabet.M);
    return {M / (q.interval.hi - 1), M / (q.interval.lo - 1)};
}

namespace detail {

// sign(pi_q(f) - 1) as the sign of an integer polynomial: clearing the
// positive denominator q^s (q^t - 1) leaves
//   N(q) = U q^t - U + A - q^{s+t} + q^s.
inline Poly pi_minus_one_sign_poly(const EvPeriodic& f) {
    long s = static_cast<long>(f.preamble.size());
    long t = static_cast<long>(f.period.size());
    Poly U = int_poly_from_digits(f.preamble);
    Poly A = int_poly_from_digits(f.period);
    Poly N = U * Poly::monomial(t, Rational(1)) - U + A - Poly::monomial(s + t, Rational(1)) +
             Poly::monomial(s, Rational(1));
    return N;
}

inline int sign_of(const Rational& v) { return v > 0 ? 1 : v < 0 ? -1 : 0; }

// Certified sign of pi_q(x) - 1 at a rational point q > 1 for a lazily
// generated sequence.  Scaled-integer arithmetic with directed rounding:
// slo/2^B and shi/2^B bracket the partial sum, and the geometric tail bound
// closes the enclosure.  Escalates the working precision before giving up.
inline int sign_pi_minus_one_seq(const Rational& q, const DigitSeq& x, long max_terms) {
    int M = x.alphabet().M;
    const Integer num = q.get_num();
    const Integer den = q.get_den();
    Integer gap = num - den;  // positive since q > 1
    for (long B = 192; B <= 8192; B *= 2) {
        Integer scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 2, static_cast<unsigned long>(B));
        Integer zlo, rem, tmp;
        tmp = scale * den;
        mpz_fdiv_qr(zlo.get_mpz_t(), rem.get_mpz_t(), tmp.get_mpz_t(), num.get_mpz_t());
        Integer zhi = zlo + (rem != 0 ? 1 : 0);
        Integer plo = zlo, phi = zhi, slo(0), shi(0);
        long check = 64;
        for (long i = 1; i <= max_terms; ++i) {
            int d = x.digit_at(i);
            if (d) {
                slo += d * plo;
                shi += d * phi;
            }
            tmp = plo * zlo;
            mpz_fdiv_q_2exp(plo.get_mpz_t(), tmp.get_mpz_t(), static_cast<mp_bitcnt_t>(B));
            tmp = phi * zhi;
            mpz_cdiv_q_2exp(phi.get_mpz_t(), tmp.get_mpz_t(), static_cast<mp_bitcnt_t>(B));
            if (i == check || i == max_terms || phi == 0) {
                if (slo > scale) return 1;
                tmp = M * phi * num;
                Integer tail;
                mpz_cdiv_q(tail.get_mpz_t(), tmp.get_mpz_t(), gap.get_mpz_t());
                if (shi + tail < scale) return -1;
                if (phi == 0) break;  // tail exhausted; precision is the blocker
                check *= 2;
            }
        }
    }
    return 0;
}

struct SignAtBase {
    // Certified sign of pi_q(seq) - 1 at rational q', where the base was
    // defined by seq.  Polynomial route when available.
    const std::optional<Poly>& poly;
    const DigitSeq& seq;
    long max_terms;

    int operator()(const Rational& q) const {
        if (poly) return sign_of(poly->eval(q));
        int s = sign_pi_minus_one_seq(q, seq, max_terms);
        if (s == 0) throw PrecisionExhausted("cannot certify sign of pi(q)-1 at bisection point");
        return s;
    }
};

}  // namespace detail

enum class Validity { Yes, No, Unknown };

struct AlphaCheck {
    Validity verdict;
    long witness = 0;  // first shift that exceeds the sequence, when No
};

// Checks that every shift of x stays lexicographically <= x and that x
// provably does not end in 0^inf.  Exact for eventually periodic sequences
// (their tails repeat); depth-capped otherwise.
inline AlphaCheck is_valid_alpha(const DigitSeq& x, long depth = 4096) {
    if (depth < 1) throw Error("depth must be >= 1");

    bool not_zero_tail = false;
    auto form = x.eventually_periodic_form();
    if (form) {
        not_zero_tail = false;
        for (int d : form->period)
            if (d) not_zero_tail = true;
        if (!not_zero_tail) return {Validity::No, 0};  // ends in 0^inf
    } else if (x.kind() == DigitSeq::Kind::ThueMorseLambda ||
               x.kind() == DigitSeq::Kind::DvkDoubling) {
        // complement-doubling and Thue-Morse generators never stabilize at 0
        not_zero_tail = true;
    }

    long shifts = depth;
    bool exhaustive = false;
    if (form) {
        long cover = static_cast<long>(form->preamble.size() + form->period.size());
        if (cover <= depth) {
            shifts = cover;
            exhaustive = true;
        }
    }
    for (long n = 1; n <= shifts; ++n) {
        LexResult r = lex_compare(x.shifted(n), x, depth + n);
        if (r.kind == LexResult::Greater) return {Validity::No, n};
        if (r.kind == LexResult::Undecided) return {Validity::Unknown, n};
    }
    if (!not_zero_tail) return {Validity::Unknown, 0};
    if (!exhaustive && !form) {
        // All tested shifts pass; Yes is relative to the requested depth.
        return {Validity::Yes, 0};
    }
    return {Validity::Yes, 0};
}

// The unique q with pi_q(x) = 1, by bisection on the strictly decreasing map
// q -> pi_q(x).  Enclosure width at most 2^-precision_bits (or exact).
inline BaseEnclosure base_from_alpha(const DigitSeq& x,
                                     unsigned precision_bits = kDefaultPrecisionBits,
                                     long validation_depth = 256) {
    AlphaCheck chk = is_valid_alpha(x, validation_depth);
    if (chk.verdict != Validity::Yes)
        throw InvalidAlpha("sequence is not a quasi-greedy expansion of 1 (shift " +
                           std::to_string(chk.witness) + ")");
    Alphabet a = x.alphabet();
    Rational right(a.M + 1);

    std::optional<Poly> poly;
    if (auto form = x.eventually_periodic_form()) poly = detail::pi_minus_one_sign_poly(*form);
    long max_terms = 64 + 2 * (static_cast<long>(precision_bits) + 16);
    detail::SignAtBase sign{poly, x, max_terms};

    if (sign(right) == 0 && poly) {
        BaseEnclosure b(a, RationalInterval(right));
        b.defining_seq = x;
        b.sign_poly = poly;
        b.precision_bits = precision_bits;
        return b;
    }
    int sr = sign(right);
    if (sr == 0) throw PrecisionExhausted("sign at M+1 undecided");
    if (sr > 0) throw InvalidAlpha("pi_{M+1}(x) >= 1 for a sequence other than M^inf");

    // The sign polynomial is monic up to sign, so any rational root is an
    // integer; catching one here yields an exact point enclosure.
    if (poly) {
        for (int c = 2; c <= a.M; ++c) {
            if (poly->eval(Rational(c)) == 0) {
                BaseEnclosure b(a, RationalInterval(Rational(c)));
                b.defining_seq = x;
                b.sign_poly = poly;
                b.precision_bits = precision_bits;
                return b;
            }
        }
    }

    Rational left;
    bool found = false;
    for (int k = 1; k <= 128; ++k) {
        left = Rational(1) + pow2(-k);
        int s;
        try {
            s = sign(left);
        } catch (const PrecisionExhausted&) {
            continue;
        }
        if (s > 0) {
            found = true;
            break;
        }
        if (s == 0) continue;
    }
    if (!found) throw PrecisionExhausted("no left bracket with pi(q) > 1 found");

    Rational width_target = pow2(-static_cast<long>(precision_bits));
    Rational lo = left, hi = right;
    while (hi - lo > width_target) {
        Rational mid = (lo + hi) / 2;
        int s;
        try {
            s = sign(mid);
        } catch (const PrecisionExhausted&) {
            // biased split; the root is almost surely not at the midpoint
            mid = lo + (hi - lo) * Rational(7, 16);
            s = sign(mid);
        }
        if (s == 0) {
            if (poly) {
                lo = hi = mid;
                break;
            }
            throw PrecisionExhausted("bisection midpoint sign undecided");
        }
        (s > 0 ? lo : hi) = mid;
    }
    BaseEnclosure b(a, RationalInterval(lo, hi));
    b.defining_seq = x;
    b.sign_poly = poly;
    b.precision_bits = precision_bits;
    return b;
}

inline BaseEnclosure komornik_loreti(Alphabet a,
                                     unsigned precision_bits = kDefaultPrecisionBits) {
    return base_from_alpha(DigitSeq::thue_morse_lambda(a), precision_bits);
}

inline BaseEnclosure BaseEnclosure::refined(unsigned bits) const {
    if (is_point() || interval.width() <= pow2(-static_cast<long>(bits))) {
        BaseEnclosure b = *this;
        b.precision_bits = std::max(precision_bits, bits);
        return b;
    }
    if (!defining_seq) throw PrecisionExhausted("cannot refine a bare interval base");
    long max_terms = 64 + 2 * (static_cast<long>(bits) + 16);
    detail::SignAtBase sign{sign_poly, *defining_seq, max_terms};
    Rational lo = interval.lo, hi = interval.hi;
    Rational width_target = pow2(-static_cast<long>(bits));
    while (hi - lo > width_target) {
        Rational mid = (lo + hi) / 2;
        int s;
        try {
            s = sign(mid);
        } catch (const PrecisionExhausted&) {
            mid = lo + (hi - lo) * Rational(7, 16);
            s = sign(mid);
        }
        if (s == 0) {
            if (sign_poly) {
                lo = hi = mid;
                break;
            }
            throw PrecisionExhausted("bisection midpoint sign undecided");
        }
        (s > 0 ? lo : hi) = mid;
    }
    BaseEnclosure b = *this;
    b.interval = RationalInterval(lo, hi);
    b.precision_bits = bits;
    return b;
}

namespace detail {

// Largest digit strictly below v.
inline int digit_below(const Rational& v, int M) {
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    long f = fl.get_si();
    long d = (v == Rational(fl)) ? f - 1 : f;
    if (d > M) d = M;
    if (d < 0) d = 0;  // unreachable for positive remainders; keep digits in range
    return static_cast<int>(d);
}

// Exact sign of P at the root of N inside [lo, hi], where N carries strict
// signs at both endpoints (positive at lo, negative at hi) and has exactly
// one root there.  Refines the bracket in place so later queries get faster.
inline int sign_at_root(Poly P, const Poly& N, Rational& lo, Rational& hi) {
    P = P.mod(N);
    if (P.is_zero()) return 0;
    Poly g = poly_gcd(P, N);
    if (g.degree() >= 1 && sign_of(g.eval(lo)) * sign_of(g.eval(hi)) < 0) return 0;
    for (int iter = 0; iter < 4096; ++iter) {
        RationalInterval v = P.eval(RationalInterval(lo, hi));
        if (v.lo > 0) return 1;
        if (v.hi < 0) return -1;
        Rational mid = (lo + hi) / 2;
        int s = sign_of(N.eval(mid));
        if (s == 0) return sign_of(P.eval(mid));
        (s > 0 ? lo : hi) = mid;
    }
    throw PrecisionExhausted("algebraic sign refinement did not converge");
}

}  // namespace detail

// Quasi-greedy digits of 1: x_0 = 1 and alpha_i is the largest digit d <= M
// with d < q x_{i-1} (strictly, so remainders stay positive and the
// expansion never terminates); x_i = q x_{i-1} - alpha_i.
inline Word quasi_greedy_alpha(const BaseEnclosure& q, long n) {
    if (n < 1) throw Error("digit count must be positive");
    int M = q.alphabet.M;

    if (q.is_point()) {
        Rational x(1);
        std::vector<int> out;
        out.reserve(static_cast<size_t>(n));
        for (long i = 0; i < n; ++i) {
            Rational v = q.interval.lo * x;
            int d = detail::digit_below(v, M);
            out.push_back(d);
            x = v - d;
        }
        return Word(q.alphabet, std::move(out));
    }

    if (q.sign_poly) {
        // Symbolic recursion: x_{i-1} is a polynomial in q reduced mod the
        // defining polynomial, and every digit comparison is an exact sign.
        const Poly& N = *q.sign_poly;
        Rational lo = q.interval.lo, hi = q.interval.hi;
        Poly x = Poly::constant(Rational(1));
        std::vector<int> out;
        out.reserve(static_cast<size_t>(n));
        for (long i = 0; i < n; ++i) {
            Poly v = x.times_x().mod(N);
            int digit = -1;
            for (int d = M; d >= 0; --d) {
                if (detail::sign_at_root(v - Rational(d), N, lo, hi) > 0) {
                    digit = d;
                    break;
                }
            }
            if (digit < 0) throw Error("positive remainder lost in digit recursion");
            out.push_back(digit);
            x = v - Rational(digit);
        }
        return Word(q.alphabet, std::move(out));
    }

    // Interval recursion.  Digit certification needs roughly n log2(M+1)
    // extra bits, so refine up front when a defining sequence allows it.
    unsigned needed = q.precision_bits;
    if (q.defining_seq) {
        unsigned per_digit = 1;
        while ((1 << per_digit) < M + 1) ++per_digit;
        needed = std::max<unsigned>(q.precision_bits, static_cast<unsigned>(n) * per_digit + 96);
    }
    BaseEnclosure base = q.defining_seq ? q.refined(needed) : q;
    for (int attempt = 0;; ++attempt) {
        RationalInterval x{Rational(1)};
        std::vector<int> out;
        out.reserve(static_cast<size_t>(n));
        bool ok = true;
        for (long i = 0; i < n && ok; ++i) {
            RationalInterval v = base.interval * x;
            int dlo = detail::digit_below(v.lo, M);
            int dhi = detail::digit_below(v.hi, M);
            if (dlo != dhi) {
                ok = false;
                break;
            }
            out.push_back(dlo);
            x = v - Rational(dlo);
        }
        if (ok) return Word(q.alphabet, std::move(out));
        if (!base.defining_seq || attempt >= 4)
            throw PrecisionExhausted(
                "digit choice straddles a boundary; refine the base enclosure and retry");
        needed *= 2;
        base = base.refined(needed);
    }
}

inline Word BaseEnclosure::alpha_prefix(long n) const {
    if (defining_seq) return defining_seq->prefix(n);
    return quasi_greedy_alpha(*this, n);
}

// Exact order on bases.  Bases defined by sequences compare through the
// strictly increasing correspondence between bases and their expansions;
// numeric refinement settles the rest.
inline Ordering compare_bases(const BaseEnclosure& a, const BaseEnclosure& b) {
    if (a.alphabet != b.alphabet) throw AlphabetMismatch();
    if (a.defining_seq && b.defining_seq) {
        LexResult r = lex_compare(*a.defining_seq, *b.defining_seq);
        if (r.kind == LexResult::Less) return Ordering::Less;
        if (r.kind == LexResult::Greater) return Ordering::Greater;
        if (r.kind == LexResult::Equal) return Ordering::Equal;
    }
    if (a.is_point() && b.is_point())
        return a.interval.lo < b.interval.lo   ? Ordering::Less
               : a.interval.lo > b.interval.lo ? Ordering::Greater
                                               : Ordering::Equal;
    // Point against a polynomial-backed root: sign(N) = sign(pi - 1) holds on
    // all of (1, M+1] and pi is strictly decreasing there, so one exact sign
    // decides the order globally.
    if (a.is_point() && b.sign_poly) {
        int s = detail::sign_of(b.sign_poly->eval(a.interval.lo));
        if (s == 0) return Ordering::Equal;
        return s > 0 ? Ordering::Less : Ordering::Greater;
    }
    if (b.is_point() && a.sign_poly) {
        Ordering o = compare_bases(b, a);
        return o == Ordering::Less ? Ordering::Greater : o == Ordering::Greater ? Ordering::Less : o;
    }
    BaseEnclosure x = a, y = b;
    for (unsigned bits = std::max({x.precision_bits, y.precision_bits, 64u}); bits <= 4096;
         bits *= 2) {
        if (x.interval.certainly_less(y.interval)) return Ordering::Less;
        if (y.interval.certainly_less(x.interval)) return Ordering::Greater;
        try {
            x = x.refined(bits * 2);
            y = y.refined(bits * 2);
        } catch (const PrecisionExhausted&) {
            break;
        }
    }
    if (x.interval.certainly_less(y.interval)) return Ordering::Less;
    if (y.interval.certainly_less(x.interval)) return Ordering::Greater;
    throw UndecidableAtPrecision("base order undecided at configured precision");
}

// Exact order of a base against the base defined by an eventually periodic
// expansion, without bracketing the latter's root: one lexicographic
// comparison when the base carries its own expansion, otherwise one sign of
// the defining polynomial at the rational point.
inline Ordering compare_base_to_alpha(const BaseEnclosure& q, const DigitSeq& alpha) {
    if (q.defining_seq) {
        LexResult r = lex_compare(*q.defining_seq, alpha);
        if (r.kind == LexResult::Less) return Ordering::Less;
        if (r.kind == LexResult::Greater) return Ordering::Greater;
        if (r.kind == LexResult::Equal) return Ordering::Equal;
        throw UndecidableAtPrecision("sequence order undecided");
    }
    auto form = alpha.eventually_periodic_form();
    if (q.is_point() && form) {
        Poly n = detail::pi_minus_one_sign_poly(*form);
        int s = detail::sign_of(n.eval(q.interval.lo));
        return s == 0 ? Ordering::Equal : s > 0 ? Ordering::Less : Ordering::Greater;
    }
    return compare_bases(q, base_from_alpha(alpha, q.precision_bits));
}


}  // namespace univoque
