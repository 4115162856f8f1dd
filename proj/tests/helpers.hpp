#pragma once

#include <random>
#include <vector>

#include "univoque/univoque.hpp"

namespace testutil {

using namespace univoque;

inline double mid(const RationalInterval& i) { return i.mid().get_d(); }

inline double width(const RationalInterval& i) { return i.width().get_d(); }

inline bool contains_decimal(const RationalInterval& i, const char* dec, double eps) {
    Rational v = rational_from_decimal(dec);
    return i.lo.get_d() <= v.get_d() + eps && i.hi.get_d() >= v.get_d() - eps;
}

// All words over {0..M} of exactly length len, in lexicographic order.
inline std::vector<Word> all_words(Alphabet a, int len) {
    std::vector<Word> out;
    std::vector<int> digits(static_cast<size_t>(len), 0);
    for (;;) {
        out.emplace_back(a, digits);
        int i = len - 1;
        while (i >= 0 && digits[static_cast<size_t>(i)] == a.M) digits[static_cast<size_t>(i--)] = 0;
        if (i < 0) break;
        ++digits[static_cast<size_t>(i)];
    }
    return out;
}

// Periodic words whose infinite repetition is a valid quasi-greedy expansion.
inline std::vector<Word> valid_periodic_alpha_words(Alphabet a, int max_len) {
    std::vector<Word> out;
    for (int len = 1; len <= max_len; ++len)
        for (const Word& w : all_words(a, len))
            if (is_valid_alpha(DigitSeq::periodic(w)).verdict == Validity::Yes)
                out.push_back(w);
    return out;
}

inline Word random_word(std::mt19937_64& rng, Alphabet a, int len) {
    std::uniform_int_distribution<int> d(0, a.M);
    std::vector<int> digits(static_cast<size_t>(len));
    for (auto& x : digits) x = d(rng);
    return Word(a, digits);
}

// Random bit word starting with 1.
inline Word random_ref_bits(std::mt19937_64& rng, int len) {
    std::uniform_int_distribution<int> d(0, 1);
    std::vector<int> digits(static_cast<size_t>(len));
    digits[0] = 1;
    for (size_t i = 1; i < digits.size(); ++i) digits[i] = d(rng);
    return Word(Alphabet(1), digits);
}

}  // namespace testutil
