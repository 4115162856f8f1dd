#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <string>
#include <utility>

#include "univoque/errors.hpp"

namespace univoque {

using Rational = mpq_class;
using Integer = mpz_class;

inline constexpr unsigned kDefaultPrecisionBits = 128;

inline Rational pow2(long e) {
    Rational r(1);
    if (e >= 0)
        mpz_mul_2exp(r.get_num_mpz_t(), r.get_num_mpz_t(), static_cast<mp_bitcnt_t>(e));
    else
        mpz_mul_2exp(r.get_den_mpz_t(), r.get_den_mpz_t(), static_cast<mp_bitcnt_t>(-e));
    r.canonicalize();
    return r;
}

inline Integer ipow(long base, unsigned long e) {
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), e);
    return r;
}

// Closed rational interval.  All arithmetic rounds outward by construction
// (endpoints are exact), so enclosures stay certified.
struct RationalInterval {
    Rational lo, hi;

    RationalInterval() : lo(0), hi(0) {}
    explicit RationalInterval(Rational v) : lo(v), hi(std::move(v)) {}
    RationalInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw Error("interval endpoints out of order");
    }

    static RationalInterval hull(const RationalInterval& a, const RationalInterval& b) {
        return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
    }

    bool is_point() const { return lo == hi; }
    Rational width() const { return hi - lo; }
    Rational mid() const { return (lo + hi) / 2; }

    bool contains(const Rational& v) const { return lo <= v && v <= hi; }
    bool contains(const RationalInterval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool intersects(const RationalInterval& o) const { return lo <= o.hi && o.lo <= hi; }

    bool certainly_less(const RationalInterval& o) const { return hi < o.lo; }
    bool certainly_greater(const RationalInterval& o) const { return lo > o.hi; }

    RationalInterval operator-() const { return {-hi, -lo}; }

    RationalInterval operator+(const RationalInterval& o) const { return {lo + o.lo, hi + o.hi}; }
    RationalInterval operator-(const RationalInterval& o) const { return {lo - o.hi, hi - o.lo}; }

    RationalInterval operator*(const RationalInterval& o) const {
        Rational a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
        return {std::min(std::min(a, b), std::min(c, d)), std::max(std::max(a, b), std::max(c, d))};
    }

    RationalInterval operator/(const RationalInterval& o) const {
        if (o.contains(Rational(0))) throw Error("interval division by interval containing zero");
        RationalInterval inv{Rational(1) / o.hi, Rational(1) / o.lo};
        return *this * inv;
    }

    RationalInterval operator+(const Rational& v) const { return {lo + v, hi + v}; }
    RationalInterval operator-(const Rational& v) const { return {lo - v, hi - v}; }
    RationalInterval operator*(const Rational& v) const {
        return v >= 0 ? RationalInterval{lo * v, hi * v} : RationalInterval{hi * v, lo * v};
    }
    RationalInterval operator/(const Rational& v) const {
        if (v == 0) throw Error("interval division by zero");
        return v > 0 ? RationalInterval{lo / v, hi / v} : RationalInterval{hi / v, lo / v};
    }

    RationalInterval clamped(const Rational& floor_v, const Rational& ceil_v) const {
        return {std::max(lo, floor_v), std::min(hi, ceil_v)};
    }
};

inline RationalInterval operator*(const Rational& v, const RationalInterval& i) { return i * v; }

namespace detail {

inline Rational mpfr_to_rational(mpfr_srcptr f) {
    if (mpfr_zero_p(f)) return Rational(0);
    Integer z;
    mpfr_exp_t e = mpfr_get_z_2exp(z.get_mpz_t(), f);
    Rational r(z);
    return r * pow2(static_cast<long>(e));
}

inline Rational log_directed(const Rational& x, unsigned prec_bits, mpfr_rnd_t dir) {
    if (x <= 0) throw Error("log of non-positive value");
    mpfr_t fx, r;
    mpfr_init2(fx, prec_bits + 32);
    mpfr_init2(r, prec_bits + 32);
    mpfr_set_q(fx, x.get_mpq_t(), dir);
    mpfr_log(r, fx, dir);
    Rational out = mpfr_to_rational(r);
    mpfr_clear(fx);
    mpfr_clear(r);
    return out;
}

}  // namespace detail

// Certified natural-log enclosure.
inline RationalInterval log_enclosure(const RationalInterval& x,
                                      unsigned prec_bits = kDefaultPrecisionBits) {
    return {detail::log_directed(x.lo, prec_bits, MPFR_RNDD),
            detail::log_directed(x.hi, prec_bits, MPFR_RNDU)};
}

inline RationalInterval log_enclosure(const Rational& x,
                                      unsigned prec_bits = kDefaultPrecisionBits) {
    return log_enclosure(RationalInterval(x), prec_bits);
}

// Decimal rendering.  dir < 0 rounds down, dir > 0 up, dir == 0 to nearest.
inline std::string decimal_string(const Rational& x, int frac_digits, int dir = 0) {
    Integer scale = ipow(10, static_cast<unsigned long>(frac_digits));
    Rational scaled = x * Rational(scale);
    Integer n;
    if (dir < 0)
        mpz_fdiv_q(n.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    else if (dir > 0)
        mpz_cdiv_q(n.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    else {
        Rational half = scaled + Rational(1, 2);
        mpz_fdiv_q(n.get_mpz_t(), half.get_num_mpz_t(), half.get_den_mpz_t());
    }
    bool neg = n < 0;
    Integer a = neg ? Integer(-n) : n;
    std::string digits = a.get_str();
    if (static_cast<int>(digits.size()) <= frac_digits)
        digits.insert(0, static_cast<size_t>(frac_digits) + 1 - digits.size(), '0');
    std::string out = digits.substr(0, digits.size() - frac_digits);
    if (frac_digits > 0) out += "." + digits.substr(digits.size() - frac_digits);
    return (neg ? "-" : "") + out;
}

// Parses a plain decimal literal ("1.8", "-0.25") into an exact rational.
inline Rational rational_from_decimal(const std::string& s) {
    if (s.empty()) throw ParseError("empty decimal literal");
    std::string t = s;
    bool neg = false;
    if (t[0] == '+' || t[0] == '-') {
        neg = t[0] == '-';
        t = t.substr(1);
    }
    auto dot = t.find('.');
    std::string ip = dot == std::string::npos ? t : t.substr(0, dot);
    std::string fp = dot == std::string::npos ? "" : t.substr(dot + 1);
    if (ip.empty() && fp.empty()) throw ParseError("bad decimal literal: " + s);
    for (char c : ip + fp)
        if (c < '0' || c > '9') throw ParseError("bad decimal literal: " + s);
    Integer num(ip.empty() ? "0" : ip);
    for (char c : fp) {
        num *= 10;
        num += c - '0';
    }
    Rational r(num, ipow(10, fp.size()));
    r.canonicalize();
    return neg ? Rational(-r) : r;
}

// "1.6180339887 ± 1e-10"-style rendering for an enclosure.  The printed
// midpoint and radius always cover the interval.
inline std::string plus_minus_string(const RationalInterval& iv, int max_digits = 12) {
    if (iv.is_point()) {
        if (iv.lo.get_den() == 1) return iv.lo.get_num().get_str() + " (exact)";
        return decimal_string(iv.lo, max_digits) + " (exact)";
    }
    Rational half = iv.width() / 2;
    int e = 0;
    Rational p(1);
    while (e < max_digits && half <= p / 10) {
        p /= 10;
        ++e;
    }
    std::string mid = decimal_string(iv.mid(), e);
    // Radius: interval half-width plus the rounding of the printed midpoint,
    // reported with one significant digit, rounded up.
    Rational err = half + pow2(0) / (2 * Rational(ipow(10, static_cast<unsigned long>(e))));
    Rational scaled = err * Rational(ipow(10, static_cast<unsigned long>(e)));
    Integer c;
    mpz_cdiv_q(c.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    int f = e;
    while (c >= 10) {
        Integer q;
        mpz_cdiv_q_ui(q.get_mpz_t(), c.get_mpz_t(), 10);
        c = q;
        --f;
    }
    std::string exp = f >= 0 ? "e-" + std::to_string(f) : "e+" + std::to_string(-f);
    return mid + " ± " + c.get_str() + exp;
}

}  // namespace univoque
