#pragma once

#include <vector>

#include "univoque/numeric.hpp"

namespace univoque {

// Dense univariate polynomial with rational coefficients, ascending order.
// Degrees stay small (at most preamble + period of a defining sequence), so
// naive arithmetic is fine.
struct Poly {
    std::vector<Rational> c;

    Poly() = default;
    explicit Poly(std::vector<Rational> coeffs) : c(std::move(coeffs)) { trim(); }

    static Poly constant(const Rational& v) { return Poly({v}); }
    static Poly monomial(long deg, const Rational& v) {
        std::vector<Rational> coeffs(static_cast<size_t>(deg) + 1, Rational(0));
        coeffs.back() = v;
        return Poly(std::move(coeffs));
    }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    long degree() const { return static_cast<long>(c.size()) - 1; }

    Rational eval(const Rational& x) const {
        Rational r(0);
        for (size_t i = c.size(); i-- > 0;) r = r * x + c[i];
        return r;
    }

    RationalInterval eval(const RationalInterval& x) const {
        RationalInterval r{Rational(0)};
        for (size_t i = c.size(); i-- > 0;) r = r * x + RationalInterval(c[i]);
        return r;
    }

    Poly operator+(const Poly& o) const {
        std::vector<Rational> r(std::max(c.size(), o.c.size()), Rational(0));
        for (size_t i = 0; i < c.size(); ++i) r[i] += c[i];
        for (size_t i = 0; i < o.c.size(); ++i) r[i] += o.c[i];
        return Poly(std::move(r));
    }
    Poly operator-(const Poly& o) const {
        std::vector<Rational> r(std::max(c.size(), o.c.size()), Rational(0));
        for (size_t i = 0; i < c.size(); ++i) r[i] += c[i];
        for (size_t i = 0; i < o.c.size(); ++i) r[i] -= o.c[i];
        return Poly(std::move(r));
    }
    Poly operator-(const Rational& v) const {
        Poly r = *this;
        if (r.c.empty()) r.c.push_back(Rational(0));
        r.c[0] -= v;
        r.trim();
        return r;
    }
    Poly operator*(const Poly& o) const {
        if (is_zero() || o.is_zero()) return {};
        std::vector<Rational> r(c.size() + o.c.size() - 1, Rational(0));
        for (size_t i = 0; i < c.size(); ++i)
            for (size_t j = 0; j < o.c.size(); ++j) r[i + j] += c[i] * o.c[j];
        return Poly(std::move(r));
    }
    Poly times_x() const {
        if (is_zero()) return {};
        std::vector<Rational> r;
        r.reserve(c.size() + 1);
        r.push_back(Rational(0));
        r.insert(r.end(), c.begin(), c.end());
        return Poly(std::move(r));
    }

    // Remainder of *this divided by d (d nonzero).
    Poly mod(const Poly& d) const {
        if (d.is_zero()) throw Error("polynomial division by zero");
        Poly r = *this;
        long dd = d.degree();
        while (!r.is_zero() && r.degree() >= dd) {
            Rational f = r.c.back() / d.c.back();
            long shift = r.degree() - dd;
            for (long i = 0; i <= dd; ++i)
                r.c[static_cast<size_t>(i + shift)] -= f * d.c[static_cast<size_t>(i)];
            r.c.pop_back();
            r.trim();
        }
        return r;
    }

    Poly monic() const {
        if (is_zero()) return {};
        Poly r = *this;
        Rational lead = r.c.back();
        for (auto& v : r.c) v /= lead;
        return r;
    }
};

inline Poly poly_gcd(Poly a, Poly b) {
    a = a.monic();
    b = b.monic();
    while (!b.is_zero()) {
        Poly r = a.mod(b).monic();
        a = std::move(b);
        b = std::move(r);
    }
    return a;  // monic, or zero if both inputs were zero
}

}  // namespace univoque
