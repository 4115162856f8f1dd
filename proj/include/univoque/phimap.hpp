#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "univoque/expansion.hpp"
#include "univoque/words.hpp"

namespace univoque {

// The four length-m letters of the block language, in lexicographic order of
// the underlying digit words.  Complementing a block is code -> 3 - code.
enum class LBlock : int { BarAPlus = 0, BarA = 1, A = 2, APlus = 3 };

inline int phi_bit(LBlock b) { return (b == LBlock::BarA || b == LBlock::APlus) ? 1 : 0; }

inline std::string lblock_name(LBlock b) {
    switch (b) {
        case LBlock::BarAPlus: return "~a+";
        case LBlock::BarA: return "~a";
        case LBlock::A: return "a";
        case LBlock::APlus: return "a+";
    }
    return "?";
}

// Two-state automaton (plus a start state) whose labels are the four blocks
// built from a generating word.  Both label sets are right-resolving: the
// block labels on the out-edges of a state differ, and so do their bits.
//
//   Start --a+/1--> A
//   A --~a/1--> A      A --~a+/0--> B
//   B --a/0-->  B      B --a+/1--> A
class PhiAutomaton {
public:
    enum State : int { Start = 0, StateA = 1, StateB = 2 };

    explicit PhiAutomaton(Word generator)
        : word_(std::move(generator)),
          blocks_{word_.incremented_last().complement(),  // ~a+
                  word_.complement(),                     // ~a
                  word_,                                  // a
                  word_.incremented_last()} {}            // a+

    const Word& word() const { return word_; }
    long m() const { return word_.size(); }
    const Word& block(LBlock b) const { return blocks_[static_cast<size_t>(b)]; }

    // Out-edges.  Start has a single a+ edge; A and B have two each.
    std::vector<std::pair<LBlock, int>> out_edges(int state) const {
        switch (state) {
            case Start: return {{LBlock::APlus, StateA}};
            case StateA: return {{LBlock::BarA, StateA}, {LBlock::BarAPlus, StateB}};
            case StateB: return {{LBlock::A, StateB}, {LBlock::APlus, StateA}};
        }
        throw Error("bad automaton state");
    }

    int step(int state, LBlock b) const {
        for (auto [lab, to] : out_edges(state))
            if (lab == b) return to;
        return -1;
    }

    std::optional<std::pair<LBlock, int>> edge_for_bit(int state, int bit) const {
        for (auto [lab, to] : out_edges(state))
            if (phi_bit(lab) == bit) return std::make_pair(lab, to);
        return std::nullopt;
    }

    // Matches m digits starting at position pos (1-based) of x against the
    // out-edges of `state`.
    std::optional<std::pair<LBlock, int>> match_block(const DigitSeq& x, long pos,
                                                      int state) const {
        for (auto [lab, to] : out_edges(state)) {
            const Word& w = block(lab);
            bool ok = true;
            for (long i = 0; i < m() && ok; ++i) ok = x.digit_at(pos + i) == w[i];
            if (ok) return std::make_pair(lab, to);
        }
        return std::nullopt;
    }

private:
    Word word_;
    std::array<Word, 4> blocks_;
};

// A sequence of block letters, stored as a digit sequence over {0,..,3} so
// eventually periodic closed forms carry over.
struct BlockSeq {
    PhiAutomaton automaton;
    DigitSeq codes;  // alphabet {0..3}

    LBlock block_at(long i) const { return static_cast<LBlock>(codes.digit_at(i)); }

    std::string to_string(long n) const {
        std::string s;
        for (long i = 1; i <= n; ++i) {
            if (i > 1) s += " ";
            s += lblock_name(block_at(i));
        }
        return s;
    }
};

namespace detail {

inline Alphabet block_alphabet() { return Alphabet(3); }

// Key identifying the generator position of an eventually periodic sequence,
// for cycle detection while chunking into blocks.
inline long position_key(const EvPeriodic& f, long pos0) {  // pos0 is 0-based
    long s = static_cast<long>(f.preamble.size());
    long t = static_cast<long>(f.period.size());
    return pos0 < s ? pos0 : s + (pos0 - s) % t;
}

}  // namespace detail

// Factors x into automaton blocks starting from Start (so x must begin with
// a+).  Eventually periodic inputs yield an eventually periodic block
// sequence found by cycle detection; other inputs yield n_blocks letters.
inline BlockSeq parse_blocks(const DigitSeq& x, const PhiAutomaton& aut, long n_blocks) {
    if (x.alphabet() != aut.word().alphabet()) throw AlphabetMismatch();
    long m = aut.m();
    auto form = x.eventually_periodic_form();

    std::vector<int> codes;
    int state = PhiAutomaton::Start;
    if (form) {
        std::map<std::pair<int, long>, size_t> seen;
        long pos = 1;
        for (;;) {
            long key = detail::position_key(*form, pos - 1);
            auto it = seen.find({state, key});
            if (it != seen.end()) {
                std::vector<int> pre(codes.begin(), codes.begin() + static_cast<long>(it->second));
                std::vector<int> per(codes.begin() + static_cast<long>(it->second), codes.end());
                Alphabet ba = detail::block_alphabet();
                DigitSeq seq = pre.empty() ? DigitSeq::periodic(Word(ba, per))
                                           : DigitSeq::eventually_periodic(Word(ba, pre), Word(ba, per));
                return {aut, seq};
            }
            seen[{state, key}] = codes.size();
            auto hit = aut.match_block(x, pos, state);
            if (!hit) throw NotInXJ(pos, static_cast<long>(codes.size()) + 1);
            codes.push_back(static_cast<int>(hit->first));
            state = hit->second;
            pos += m;
        }
    }

    if (n_blocks < 1) throw Error("n_blocks must be positive");
    long pos = 1;
    for (long k = 0; k < n_blocks; ++k) {
        auto hit = aut.match_block(x, pos, state);
        if (!hit) throw NotInXJ(pos, k + 1);
        codes.push_back(static_cast<int>(hit->first));
        state = hit->second;
        pos += m;
    }
    return {aut, DigitSeq::finite(Word(detail::block_alphabet(), std::move(codes)))};
}

namespace detail {

// Apply a digitwise map to an eventually periodic or finite sequence.
template <typename F>
DigitSeq map_digits(const DigitSeq& s, Alphabet out_alpha, F f) {
    if (auto form = s.eventually_periodic_form()) {
        std::vector<int> pre, per;
        for (int d : form->preamble) pre.push_back(f(d));
        for (int d : form->period) per.push_back(f(d));
        if (pre.empty()) return DigitSeq::periodic(Word(out_alpha, per));
        return DigitSeq::eventually_periodic(Word(out_alpha, pre), Word(out_alpha, per));
    }
    if (s.is_finite()) {
        std::vector<int> ds;
        for (long i = 1; i <= s.finite_length(); ++i) ds.push_back(f(s.digit_at(i)));
        return DigitSeq::finite(Word(out_alpha, ds));
    }
    throw Error("cannot map a lazily generated sequence digitwise");
}

}  // namespace detail

// Bit image of a block sequence; the first bit is always 1.
inline DigitSeq phi_forward(const BlockSeq& b) {
    return detail::map_digits(b.codes, Alphabet(1),
                              [](int c) { return phi_bit(static_cast<LBlock>(c)); });
}

// Unique block sequence whose bits spell y; the automaton is right-resolving
// in the bit labels, so the walk is deterministic.
inline BlockSeq phi_inverse(const DigitSeq& y, const PhiAutomaton& aut, long n_blocks) {
    if (y.alphabet().M != 1) throw InvalidReference("reference sequences use the alphabet {0,1}");
    if (y.digit_at(1) != 1) throw InvalidReference("reference sequence must start with 1");

    std::vector<int> codes;
    int state = PhiAutomaton::Start;
    auto form = y.eventually_periodic_form();
    if (form) {
        std::map<std::pair<int, long>, size_t> seen;
        long pos = 1;
        for (;;) {
            long key = detail::position_key(*form, pos - 1);
            auto it = seen.find({state, key});
            if (it != seen.end()) {
                std::vector<int> pre(codes.begin(), codes.begin() + static_cast<long>(it->second));
                std::vector<int> per(codes.begin() + static_cast<long>(it->second), codes.end());
                Alphabet ba = detail::block_alphabet();
                DigitSeq seq = pre.empty() ? DigitSeq::periodic(Word(ba, per))
                                           : DigitSeq::eventually_periodic(Word(ba, pre), Word(ba, per));
                return {aut, seq};
            }
            seen[{state, key}] = codes.size();
            auto e = aut.edge_for_bit(state, y.digit_at(pos));
            if (!e) throw InvalidReference("no automaton edge for bit at position " +
                                           std::to_string(pos));
            codes.push_back(static_cast<int>(e->first));
            state = e->second;
            ++pos;
        }
    }

    if (n_blocks < 1) throw Error("n_blocks must be positive");
    for (long k = 1; k <= n_blocks; ++k) {
        auto e = aut.edge_for_bit(state, y.digit_at(k));
        if (!e) throw InvalidReference("no automaton edge for bit at position " + std::to_string(k));
        codes.push_back(static_cast<int>(e->first));
        state = e->second;
    }
    return {aut, DigitSeq::finite(Word(detail::block_alphabet(), std::move(codes)))};
}

// Expands a block sequence back to digits over the original alphabet.
inline DigitSeq blocks_to_digits(const BlockSeq& b) {
    const PhiAutomaton& aut = b.automaton;
    auto expand = [&](const std::vector<int>& codes) {
        std::vector<int> out;
        for (int c : codes) {
            const Word& w = aut.block(static_cast<LBlock>(c));
            out.insert(out.end(), w.digits().begin(), w.digits().end());
        }
        return out;
    };
    Alphabet a = aut.word().alphabet();
    if (auto form = b.codes.eventually_periodic_form()) {
        std::vector<int> pre = expand(form->preamble);
        std::vector<int> per = expand(form->period);
        if (pre.empty()) return DigitSeq::periodic(Word(a, per));
        return DigitSeq::eventually_periodic(Word(a, pre), Word(a, per));
    }
    if (b.codes.is_finite()) {
        std::vector<int> codes;
        for (long i = 1; i <= b.codes.finite_length(); ++i) codes.push_back(b.codes.digit_at(i));
        return DigitSeq::finite(Word(a, expand(codes)));
    }
    throw Error("cannot expand a lazily generated block sequence");
}

// Walks the automaton along the bits of a reference word and concatenates the
// block labels; the result generates the child interval whose image under the
// induced base map is the reference plateau.
inline Word pullback_plateau(const Word& ref_word, const PhiAutomaton& aut) {
    if (ref_word.alphabet().M != 1) throw InvalidReference("reference word must be over {0,1}");
    if (ref_word[0] != 1) throw InvalidReference("reference word must start with 1");
    int state = PhiAutomaton::Start;
    std::optional<Word> out;
    for (long i = 0; i < ref_word.size(); ++i) {
        auto e = aut.edge_for_bit(state, ref_word[i]);
        if (!e) throw InvalidReference("reference word leaves the automaton at position " +
                                       std::to_string(i + 1));
        const Word& lab = aut.block(e->first);
        out = out ? out->concat(lab) : lab;
        state = e->second;
    }
    return *out;
}

}  // namespace univoque
