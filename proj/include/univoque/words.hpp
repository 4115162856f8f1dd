#pragma once

#include <algorithm>
#include <cstdlib>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "univoque/errors.hpp"

namespace univoque {

// Alphabet {0, 1, ..., M}.
struct Alphabet {
    int M;
    explicit Alphabet(int m) : M(m) {
        if (m < 1) throw Error("alphabet bound M must be >= 1");
    }
    friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.M == b.M; }
    friend bool operator!=(const Alphabet& a, const Alphabet& b) { return a.M != b.M; }
};

enum class Ordering { Less, Equal, Greater };

struct LexResult {
    enum Kind { Less, Equal, Greater, Undecided } kind;
    long diff_index = 0;  // 1-based index of the first difference, when decided strictly
};

// Finite word over an alphabet.  Immutable.
class Word {
public:
    Word(Alphabet a, std::vector<int> digits) : alphabet_(a), digits_(std::move(digits)) {
        if (digits_.empty()) throw Error("word must be nonempty");
        for (int d : digits_)
            if (d < 0 || d > alphabet_.M) throw Error("digit out of alphabet range");
    }

    static Word parse(Alphabet a, const std::string& s) {
        std::vector<int> ds;
        if (a.M <= 9) {
            for (char c : s) {
                if (c < '0' || c > '9') throw ParseError("bad digit character in word: " + s);
                ds.push_back(c - '0');
            }
        } else {
            size_t pos = 0;
            while (pos < s.size()) {
                size_t comma = s.find(',', pos);
                std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos
                                                                           : comma - pos);
                if (tok.empty()) throw ParseError("bad word literal: " + s);
                ds.push_back(std::atoi(tok.c_str()));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        }
        return Word(a, std::move(ds));
    }

    Alphabet alphabet() const { return alphabet_; }
    long size() const { return static_cast<long>(digits_.size()); }
    int operator[](long i) const { return digits_[static_cast<size_t>(i)]; }  // 0-based
    const std::vector<int>& digits() const { return digits_; }

    Word complement() const {
        std::vector<int> ds(digits_.size());
        for (size_t i = 0; i < digits_.size(); ++i) ds[i] = alphabet_.M - digits_[i];
        return Word(alphabet_, std::move(ds));
    }

    Word incremented_last() const {
        if (digits_.back() >= alphabet_.M)
            throw BoundaryDigit("cannot increment: last digit equals M");
        std::vector<int> ds = digits_;
        ++ds.back();
        return Word(alphabet_, std::move(ds));
    }

    Word decremented_last() const {
        if (digits_.back() <= 0) throw BoundaryDigit("cannot decrement: last digit is 0");
        std::vector<int> ds = digits_;
        --ds.back();
        return Word(alphabet_, std::move(ds));
    }

    Word concat(const Word& o) const {
        if (o.alphabet_ != alphabet_) throw AlphabetMismatch();
        std::vector<int> ds = digits_;
        ds.insert(ds.end(), o.digits_.begin(), o.digits_.end());
        return Word(alphabet_, std::move(ds));
    }

    Word repeated(long k) const {
        if (k < 1) throw Error("repetition count must be positive");
        std::vector<int> ds;
        ds.reserve(digits_.size() * static_cast<size_t>(k));
        for (long i = 0; i < k; ++i) ds.insert(ds.end(), digits_.begin(), digits_.end());
        return Word(alphabet_, std::move(ds));
    }

    Word subword(long from, long len) const {  // 0-based
        return Word(alphabet_, std::vector<int>(digits_.begin() + from, digits_.begin() + from + len));
    }

    // Plain digit string for M <= 9, comma separated otherwise.
    std::string to_string() const {
        std::string s;
        for (size_t i = 0; i < digits_.size(); ++i) {
            if (alphabet_.M <= 9)
                s += static_cast<char>('0' + digits_[i]);
            else
                s += (i ? "," : "") + std::to_string(digits_[i]);
        }
        return s;
    }

    friend bool operator==(const Word& a, const Word& b) {
        return a.alphabet_ == b.alphabet_ && a.digits_ == b.digits_;
    }
    friend bool operator!=(const Word& a, const Word& b) { return !(a == b); }

    // Lexicographic on the digits; a proper prefix is smaller.
    friend bool operator<(const Word& a, const Word& b) {
        return std::lexicographical_compare(a.digits_.begin(), a.digits_.end(),
                                            b.digits_.begin(), b.digits_.end());
    }

private:
    Alphabet alphabet_;
    std::vector<int> digits_;
};

inline int thue_morse(unsigned long i) { return __builtin_popcountll(i) & 1; }

// Digits of the Thue-Morse-derived sequence defining the smallest univoque
// base: lambda_i = k + tau_i - tau_{i-1} when M = 2k, and k + tau_i when
// M = 2k + 1.
inline int lambda_digit(int M, long i) {
    int k = M / 2;
    int ti = thue_morse(static_cast<unsigned long>(i));
    if (M % 2 == 0) return k + ti - thue_morse(static_cast<unsigned long>(i - 1));
    return k + ti;
}

inline Word lambda_prefix(Alphabet a, long n) {
    if (n < 1) throw Error("prefix length must be positive");
    std::vector<int> ds(static_cast<size_t>(n));
    for (long i = 1; i <= n; ++i) ds[static_cast<size_t>(i - 1)] = lambda_digit(a.M, i);
    return Word(a, std::move(ds));
}

// Canonical eventually periodic form: primitive period, shortest preamble.
struct EvPeriodic {
    std::vector<int> preamble;  // may be empty
    std::vector<int> period;    // nonempty

    friend bool operator==(const EvPeriodic& a, const EvPeriodic& b) {
        return a.preamble == b.preamble && a.period == b.period;
    }

    int digit(long i) const {  // 1-based
        long s = static_cast<long>(preamble.size());
        if (i <= s) return preamble[static_cast<size_t>(i - 1)];
        return period[static_cast<size_t>((i - 1 - s) % static_cast<long>(period.size()))];
    }

    static EvPeriodic canonical(std::vector<int> pre, std::vector<int> per) {
        // primitive period
        size_t t = per.size();
        for (size_t d = 1; d <= t / 2; ++d) {
            if (t % d) continue;
            bool rep = true;
            for (size_t i = d; i < t && rep; ++i) rep = per[i] == per[i % d];
            if (rep) {
                per.resize(d);
                break;
            }
        }
        // absorb the preamble tail into the period by rotating
        while (!pre.empty() && pre.back() == per.back()) {
            per.insert(per.begin(), per.back());
            per.pop_back();
            pre.pop_back();
        }
        return {std::move(pre), std::move(per)};
    }
};

// Infinite digit sequence with a uniform digit_at interface.  Immutable and
// cheap to copy; shifting adjusts an offset so closed forms survive.
class DigitSeq {
public:
    enum class Kind { Finite, EventuallyPeriodic, ThueMorseLambda, DvkDoubling, Concatenated };

    static DigitSeq finite(Word w) {
        return DigitSeq(std::make_shared<Impl>(Impl{Kind::Finite, w.alphabet(), w.digits(), {}, {}, nullptr}), 0);
    }
    static DigitSeq periodic(Word period) {
        return eventually_periodic_raw(period.alphabet(), {}, period.digits());
    }
    static DigitSeq eventually_periodic(const Word& preamble, const Word& period) {
        if (preamble.alphabet() != period.alphabet()) throw AlphabetMismatch();
        return eventually_periodic_raw(period.alphabet(), preamble.digits(), period.digits());
    }
    static DigitSeq thue_morse_lambda(Alphabet a) {
        return DigitSeq(std::make_shared<Impl>(Impl{Kind::ThueMorseLambda, a, {}, {}, {}, nullptr}), 0);
    }
    // theta sequence: first block is seed^+, then repeated complement-and-
    // increment doubling.
    static DigitSeq dvk_doubling(Word seed) {
        Word wp = seed.incremented_last();
        return DigitSeq(std::make_shared<Impl>(
                            Impl{Kind::DvkDoubling, seed.alphabet(), wp.digits(), seed.digits(), {}, nullptr}),
                        0);
    }
    static DigitSeq concatenated(std::vector<Word> blocks, DigitSeq tail) {
        std::vector<int> flat;
        for (const Word& b : blocks) {
            if (b.alphabet() != tail.alphabet()) throw AlphabetMismatch();
            flat.insert(flat.end(), b.digits().begin(), b.digits().end());
        }
        auto impl = std::make_shared<Impl>(
            Impl{Kind::Concatenated, tail.alphabet(), std::move(flat), {}, {}, nullptr});
        impl->tail = std::make_shared<DigitSeq>(std::move(tail));
        return DigitSeq(std::move(impl), 0);
    }

    Alphabet alphabet() const { return impl_->alphabet; }
    Kind kind() const { return impl_->kind; }
    long offset() const { return offset_; }

    bool is_finite() const { return impl_->kind == Kind::Finite; }
    long finite_length() const {
        return is_finite() ? static_cast<long>(impl_->data.size()) - offset_ : -1;
    }

    // 1-based
    int digit_at(long i) const {
        if (i < 1) throw Error("digit index must be >= 1");
        return raw_digit(i + offset_);
    }

    DigitSeq shifted(long n) const {
        if (n < 0) throw Error("shift must be nonnegative");
        return DigitSeq(impl_, offset_ + n);
    }

    // Canonical eventually periodic closed form, when one exists.
    std::optional<EvPeriodic> eventually_periodic_form() const {
        if (impl_->kind == Kind::EventuallyPeriodic) {
            std::vector<int> pre = impl_->data;
            std::vector<int> per = impl_->aux;
            return apply_offset(std::move(pre), std::move(per), offset_);
        }
        if (impl_->kind == Kind::Concatenated) {
            auto tail_form = impl_->tail->eventually_periodic_form();
            if (!tail_form) return std::nullopt;
            std::vector<int> pre = impl_->data;
            pre.insert(pre.end(), tail_form->preamble.begin(), tail_form->preamble.end());
            return apply_offset(std::move(pre), std::move(tail_form->period), offset_);
        }
        return std::nullopt;
    }

    // Structural identity, used to certify equality of lazily generated
    // sequences that share a closed form.
    bool same_closed_form(const DigitSeq& o) const {
        if (alphabet() != o.alphabet()) return false;
        auto f1 = eventually_periodic_form(), f2 = o.eventually_periodic_form();
        if (f1 && f2) return *f1 == *f2;
        if (impl_->kind != o.impl_->kind) return false;
        switch (impl_->kind) {
            case Kind::ThueMorseLambda:
                return offset_ == o.offset_;
            case Kind::DvkDoubling:
                return impl_->aux == o.impl_->aux && offset_ == o.offset_;
            case Kind::Finite:
                return impl_->data == o.impl_->data && offset_ == o.offset_;
            default:
                return false;
        }
    }

    std::optional<Word> dvk_seed() const {
        if (impl_->kind != Kind::DvkDoubling || offset_ != 0) return std::nullopt;
        return Word(impl_->alphabet, impl_->aux);
    }
    bool is_lambda_seq() const { return impl_->kind == Kind::ThueMorseLambda && offset_ == 0; }

    Word prefix(long n) const {
        std::vector<int> ds(static_cast<size_t>(n));
        for (long i = 1; i <= n; ++i) ds[static_cast<size_t>(i - 1)] = digit_at(i);
        return Word(impl_->alphabet, std::move(ds));
    }

    // Serialization of the generator, used by the tree cache.
    std::string describe() const {
        auto word_str = [&](const std::vector<int>& v) {
            return Word(impl_->alphabet, v).to_string();
        };
        std::string base;
        switch (impl_->kind) {
            case Kind::Finite:
                base = "fin(" + word_str(impl_->data) + ")";
                break;
            case Kind::EventuallyPeriodic:
                base = impl_->data.empty() ? "per(" + word_str(impl_->aux) + ")"
                                           : "pre(" + word_str(impl_->data) + ")per(" + word_str(impl_->aux) + ")";
                break;
            case Kind::ThueMorseLambda:
                base = "lambda";
                break;
            case Kind::DvkDoubling:
                base = "dvk(" + word_str(impl_->aux) + ")";
                break;
            case Kind::Concatenated:
                base = "cat(" + word_str(impl_->data) + ";" + impl_->tail->describe() + ")";
                break;
        }
        if (offset_ > 0) base = "shift" + std::to_string(offset_) + ":" + base;
        return base;
    }

private:
    struct Impl {
        Kind kind;
        Alphabet alphabet;
        std::vector<int> data;  // Finite digits / EvPer preamble / Dvk seed^+ / Concat prefix
        std::vector<int> aux;   // EvPer period / Dvk seed
        std::vector<int> unused;
        std::shared_ptr<DigitSeq> tail;  // Concatenated only
    };

    DigitSeq(std::shared_ptr<const Impl> impl, long offset) : impl_(std::move(impl)), offset_(offset) {}

    static DigitSeq eventually_periodic_raw(Alphabet a, std::vector<int> pre, std::vector<int> per) {
        if (per.empty()) throw Error("period must be nonempty");
        for (int d : pre)
            if (d < 0 || d > a.M) throw Error("digit out of alphabet range");
        for (int d : per)
            if (d < 0 || d > a.M) throw Error("digit out of alphabet range");
        return DigitSeq(std::make_shared<Impl>(
                            Impl{Kind::EventuallyPeriodic, a, std::move(pre), std::move(per), {}, nullptr}),
                        0);
    }

    static EvPeriodic apply_offset(std::vector<int> pre, std::vector<int> per, long off) {
        long s = static_cast<long>(pre.size());
        long t = static_cast<long>(per.size());
        if (off >= s) {
            long rot = (off - s) % t;
            std::rotate(per.begin(), per.begin() + rot, per.end());
            pre.clear();
        } else if (off > 0) {
            pre.erase(pre.begin(), pre.begin() + off);
        }
        return EvPeriodic::canonical(std::move(pre), std::move(per));
    }

    int raw_digit(long i) const {  // 1-based against the unshifted generator
        const Impl& im = *impl_;
        switch (im.kind) {
            case Kind::Finite:
                if (i > static_cast<long>(im.data.size()))
                    throw Error("finite sequence index out of range (a prefix was expected here)");
                return im.data[static_cast<size_t>(i - 1)];
            case Kind::EventuallyPeriodic: {
                long s = static_cast<long>(im.data.size());
                if (i <= s) return im.data[static_cast<size_t>(i - 1)];
                return im.aux[static_cast<size_t>((i - 1 - s) % static_cast<long>(im.aux.size()))];
            }
            case Kind::ThueMorseLambda:
                return lambda_digit(im.alphabet.M, i);
            case Kind::DvkDoubling:
                return dvk_digit(im.data, im.alphabet.M, i);
            case Kind::Concatenated: {
                long p = static_cast<long>(im.data.size());
                if (i <= p) return im.data[static_cast<size_t>(i - 1)];
                return im.tail->digit_at(i - p);
            }
        }
        throw Error("unreachable");
    }

    // theta_i for theta_1..theta_m = seed^+ and each next block equal to the
    // complement of everything so far with the last digit incremented.
    static int dvk_digit(const std::vector<int>& wplus, int M, long i) {
        long m = static_cast<long>(wplus.size());
        if (i <= m) return wplus[static_cast<size_t>(i - 1)];
        long half = m;
        while (half * 2 < i) half *= 2;
        long j = i - half;
        int d = M - dvk_digit(wplus, M, j);
        if (j == half) d += 1;
        return d;
    }

    std::shared_ptr<const Impl> impl_;
    long offset_ = 0;
};

// Lexicographic comparison of two digit sequences, scanning at most `depth`
// digits.  Equality is reported only when certified by matching closed forms.
inline LexResult lex_compare(const DigitSeq& x, const DigitSeq& y, long depth = 4096) {
    if (x.alphabet() != y.alphabet()) throw AlphabetMismatch();
    if (depth < 1) throw Error("comparison depth must be >= 1");
    long limit = depth;
    bool both_finite = x.is_finite() && y.is_finite();
    if (both_finite) limit = std::min({depth, x.finite_length(), y.finite_length()});
    for (long i = 1; i <= limit; ++i) {
        int dx = x.digit_at(i), dy = y.digit_at(i);
        if (dx < dy) return {LexResult::Less, i};
        if (dx > dy) return {LexResult::Greater, i};
    }
    if (both_finite && x.finite_length() == y.finite_length() && limit == x.finite_length())
        return {LexResult::Equal, 0};
    if (x.same_closed_form(y)) return {LexResult::Equal, 0};
    // Two eventually periodic sequences agreeing beyond the joint preamble
    // plus one period lcm are equal.
    auto f1 = x.eventually_periodic_form(), f2 = y.eventually_periodic_form();
    if (f1 && f2) {
        long s = std::max(f1->preamble.size(), f2->preamble.size());
        long t1 = static_cast<long>(f1->period.size());
        long t2 = static_cast<long>(f2->period.size());
        long bound = s + std::lcm(t1, t2);
        if (limit >= bound) return {LexResult::Equal, 0};
    }
    return {LexResult::Undecided, 0};
}

// Decision bound for a pair of eventually periodic forms: if they agree this
// far, they are equal.
inline long ev_periodic_decision_bound(const EvPeriodic& a, const EvPeriodic& b) {
    long s = static_cast<long>(std::max(a.preamble.size(), b.preamble.size()));
    return s + std::lcm(static_cast<long>(a.period.size()), static_cast<long>(b.period.size()));
}

}  // namespace univoque
