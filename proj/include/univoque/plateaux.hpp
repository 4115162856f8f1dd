#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "univoque/expansion.hpp"
#include "univoque/phimap.hpp"

namespace univoque {

// Admissible word: complement(head) <= tail < head for every proper split,
// where head and tail are the aligned windows of equal length.  Single
// letters are admissible only for M >= 2, when M - a <= a < M.
inline bool is_admissible(const Word& w) {
    int M = w.alphabet().M;
    long m = w.size();
    if (m == 1) return M >= 2 && (M - w[0]) <= w[0] && w[0] < M;
    for (long i = 1; i < m; ++i) {
        long len = m - i;
        bool tail_lt_head = false, tail_done = false;
        bool comp_le_tail = false, comp_done = false;
        for (long j = 0; j < len; ++j) {
            int head = w[j], tail = w[i + j], comp = M - head;
            if (!tail_done) {
                if (tail < head) { tail_lt_head = true; tail_done = true; }
                else if (tail > head) { tail_lt_head = false; tail_done = true; }
            }
            if (!comp_done) {
                if (comp < tail) { comp_le_tail = true; comp_done = true; }
                else if (comp > tail) { comp_le_tail = false; comp_done = true; }
            }
            if (tail_done && comp_done) break;
        }
        if (!tail_done) tail_lt_head = false;  // equal blocks violate the strict side
        if (!comp_done) comp_le_tail = true;   // equality allowed on the weak side
        if (!tail_lt_head || !comp_le_tail) return false;
    }
    return true;
}

// Words of the shape s followed by its complement generate basic intervals
// that are not relative plateaus.
inline bool is_ss_bar_form(const Word& w) {
    long m = w.size();
    if (m % 2) return false;
    int M = w.alphabet().M;
    for (long i = 0; i < m / 2; ++i)
        if (w[m / 2 + i] != M - w[i]) return false;
    return true;
}

inline DigitSeq alpha_of_left_endpoint(const Word& w) { return DigitSeq::periodic(w); }
inline DigitSeq alpha_of_right_endpoint(const Word& w) {
    return DigitSeq::eventually_periodic(w.incremented_last(), w.complement());
}

// Endpoints of the basic interval generated by an admissible word:
// alpha(q_L) = w^inf and alpha(q_R) = w+ (complement w)^inf.
inline std::pair<BaseEnclosure, BaseEnclosure> basic_interval(
    const Word& w, unsigned precision_bits = kDefaultPrecisionBits) {
    if (!is_admissible(w)) throw NotAdmissible(w.to_string());
    BaseEnclosure qL = base_from_alpha(alpha_of_left_endpoint(w), precision_bits);
    BaseEnclosure qR = base_from_alpha(alpha_of_right_endpoint(w), precision_bits);
    return {std::move(qL), std::move(qR)};
}

// First n digits of the complement-and-increment doubling sequence seeded by
// w+; its base is the de Vries-Komornik point of the interval generated by w.
inline Word dvk_sequence(const Word& w, long n) {
    if (!is_admissible(w)) throw NotAdmissible(w.to_string());
    return DigitSeq::dvk_doubling(w).prefix(n);
}

struct SpecialPoints {
    BaseEnclosure q_G, q_F, q_c;
};

inline SpecialPoints special_points(const Word& w,
                                    unsigned precision_bits = kDefaultPrecisionBits) {
    if (!is_admissible(w)) throw NotAdmissible(w.to_string());
    Word wp = w.incremented_last();
    Word wpc = wp.complement();
    Word wc = w.complement();
    BaseEnclosure qG = base_from_alpha(DigitSeq::periodic(wp.concat(wpc)), precision_bits);
    BaseEnclosure qF =
        base_from_alpha(DigitSeq::periodic(wp.concat(wc).concat(wpc).concat(w)), precision_bits);
    BaseEnclosure qc = base_from_alpha(DigitSeq::dvk_doubling(w), precision_bits);
    return {std::move(qG), std::move(qF), std::move(qc)};
}

struct PlateauNode {
    std::vector<int> path;                 // child indices from the root; empty = root
    std::optional<Word> generating_word;   // absent for the root and for null intervals
    std::optional<Word> ref_word;          // reference word, for pulled-back children
    BaseEnclosure q_L, q_R;
    std::optional<BaseEnclosure> q_G, q_F, q_c;
    int level = 0;
    bool is_null = false;

    long word_length() const { return generating_word ? generating_word->size() : 0; }

    std::string path_string() const {
        if (path.empty()) return "root";
        std::string s;
        for (size_t i = 0; i < path.size(); ++i)
            s += (i ? "." : "") + std::to_string(path[i]);
        return s;
    }
};

enum class EndpointMode { HalfOpenRight, Open };

namespace detail {

// Order of two bases given by their expansion sequences (exact).
inline Ordering seq_base_order(const DigitSeq& a, const DigitSeq& b) {
    LexResult r = lex_compare(a, b);
    switch (r.kind) {
        case LexResult::Less: return Ordering::Less;
        case LexResult::Greater: return Ordering::Greater;
        case LexResult::Equal: return Ordering::Equal;
        default: throw UndecidableAtPrecision("sequence comparison undecided");
    }
}

}  // namespace detail

// Membership of q in the interval of a node under an endpoint convention.
inline bool node_contains(const PlateauNode& n, const BaseEnclosure& q, EndpointMode mode) {
    Ordering left = compare_bases(q, n.q_L);
    if (left != Ordering::Greater) return false;
    Ordering right = compare_bases(q, n.q_R);
    if (mode == EndpointMode::HalfOpenRight) return right != Ordering::Greater;
    return right == Ordering::Less;
}

// All admissible words up to max_word_len whose basic interval lies wholly to
// the right of the smallest univoque base, filtered down to maximal intervals
// (basic intervals are nested or disjoint) and sorted by left endpoint.
inline std::vector<Word> enumerate_level1_words(Alphabet a, int max_word_len) {
    if (max_word_len < 1) throw Error("max_word_len must be >= 1");
    DigitSeq lambda = DigitSeq::thue_morse_lambda(a);

    std::vector<Word> cands;
    std::vector<int> digits;
    auto rec = [&](auto&& self, int len) -> void {
        if (!digits.empty()) {
            Word w(a, digits);
            if (is_admissible(w) &&
                lex_compare(DigitSeq::periodic(w), lambda).kind == LexResult::Greater)
                cands.push_back(w);
        }
        if (len == max_word_len) return;
        for (int d = 0; d <= a.M; ++d) {
            digits.push_back(d);
            self(self, len + 1);
            digits.pop_back();
        }
    };
    rec(rec, 0);

    // drop intervals contained in another candidate's interval
    std::vector<Word> keep;
    for (size_t i = 0; i < cands.size(); ++i) {
        bool drop = false;
        DigitSeq li = alpha_of_left_endpoint(cands[i]);
        DigitSeq ri = alpha_of_right_endpoint(cands[i]);
        for (size_t j = 0; j < cands.size() && !drop; ++j) {
            if (i == j) continue;
            Ordering l = detail::seq_base_order(alpha_of_left_endpoint(cands[j]), li);
            Ordering r = detail::seq_base_order(ri, alpha_of_right_endpoint(cands[j]));
            bool contains = l != Ordering::Greater && r != Ordering::Greater;
            if (!contains) continue;
            bool equal = l == Ordering::Equal && r == Ordering::Equal;
            if (!equal || cands[j].size() < cands[i].size()) drop = true;
        }
        if (!drop) keep.push_back(cands[i]);
    }
    std::sort(keep.begin(), keep.end(), [](const Word& x, const Word& y) {
        if (x == y) return false;
        Ordering o = detail::seq_base_order(alpha_of_left_endpoint(x), alpha_of_left_endpoint(y));
        return o == Ordering::Less;
    });
    return keep;
}

inline PlateauNode make_level1_node(const Word& w, int index, unsigned bits,
                                    bool with_gf = true) {
    auto [qL, qR] = basic_interval(w, bits);
    if (with_gf) {
        SpecialPoints sp = special_points(w, bits);
        return PlateauNode{{index}, w, std::nullopt, std::move(qL), std::move(qR),
                           std::move(sp.q_G), std::move(sp.q_F), std::move(sp.q_c), 1, false};
    }
    BaseEnclosure qc = base_from_alpha(DigitSeq::dvk_doubling(w), bits);
    return PlateauNode{{index}, w,          std::nullopt,  std::move(qL), std::move(qR),
                       std::nullopt, std::nullopt, std::move(qc), 1,             false};
}

inline std::vector<PlateauNode> enumerate_level1(
    Alphabet a, int max_word_len,
    const std::optional<RationalInterval>& window = std::nullopt,
    unsigned precision_bits = kDefaultPrecisionBits) {
    std::vector<PlateauNode> out;
    int idx = 1;
    for (const Word& w : enumerate_level1_words(a, max_word_len)) {
        PlateauNode n = make_level1_node(w, idx, precision_bits);
        if (window) {
            bool disjoint = n.q_R.interval.certainly_less(RationalInterval(window->lo)) ||
                            n.q_L.interval.certainly_greater(RationalInterval(window->hi));
            if (disjoint) continue;
        }
        n.path = {idx};
        out.push_back(std::move(n));
        ++idx;
    }
    return out;
}

inline PlateauNode make_null_child(const PlateauNode& parent, const BaseEnclosure& right) {
    std::vector<int> p = parent.path;
    p.push_back(0);
    PlateauNode n{std::move(p), std::nullopt, std::nullopt, parent.q_L, right,
                  std::nullopt, std::nullopt, std::nullopt, parent.level + 1, true};
    return n;
}

// Child of a non-null node obtained by pulling a reference plateau word back
// through the node's automaton.
inline PlateauNode make_pullback_child(const PlateauNode& parent, const Word& ref_word,
                                       int index, unsigned bits, bool with_gf = true) {
    if (!parent.generating_word) throw Error("pullback child requires a generating word");
    PhiAutomaton aut(*parent.generating_word);
    Word w = pullback_plateau(ref_word, aut);
    PlateauNode n = make_level1_node(w, index, bits, with_gf);
    n.path = parent.path;
    n.path.push_back(index);
    n.ref_word = ref_word;
    n.level = parent.level + 1;
    return n;
}

// Children of a single node without building a tree: the null interval
// first, then the pullbacks of every reference plateau generated by a word
// of length at most max_ref_len, in ascending order of left endpoint.
inline std::vector<PlateauNode> node_children(const PlateauNode& node, int max_ref_len,
                                              unsigned precision_bits = kDefaultPrecisionBits) {
    std::vector<PlateauNode> out;
    if (node.is_null) return out;
    if (!node.generating_word || !node.q_c)
        throw Error("children need a generated plateau with its doubling point");
    out.push_back(make_null_child(node, *node.q_c));
    int idx = 1;
    for (const Word& r : enumerate_level1_words(Alphabet(1), max_ref_len))
        out.push_back(make_pullback_child(node, r, idx++, precision_bits));
    return out;
}

// The nested tree of relative plateaus, built eagerly to a fixed depth.
// Immutable after construction; queries are read-only.
class PlateauTree {
public:
    struct Options {
        int M = 1;
        int max_word_len = 8;   // level-1 enumeration horizon
        int max_ref_len = 8;    // reference-word horizon for deeper levels
        int levels = 2;
        unsigned precision_bits = kDefaultPrecisionBits;
    };

    static PlateauTree build(const Options& opts) {
        PlateauTree t(opts);
        Alphabet a(opts.M);

        BaseEnclosure top = base_from_alpha(
            DigitSeq::periodic(Word(a, std::vector<int>{a.M})), opts.precision_bits);
        BaseEnclosure bottom(a, RationalInterval(Rational(1)));
        PlateauNode root{{}, std::nullopt, std::nullopt, bottom, top,
                         std::nullopt, std::nullopt, std::nullopt, 0, false};
        t.nodes_.emplace(root.path, root);

        t.ref_words_ = enumerate_level1_words(Alphabet(1), opts.max_ref_len);

        // level 1: the null interval up to the smallest univoque base, then
        // the maximal basic intervals to its right
        t.nodes_.emplace(std::vector<int>{0}, make_null_child(root, t.qkl_));
        std::vector<std::vector<int>> frontier;
        for (PlateauNode& n : enumerate_level1(a, opts.max_word_len, std::nullopt,
                                               opts.precision_bits)) {
            frontier.push_back(n.path);
            t.nodes_.emplace(n.path, std::move(n));
        }

        for (int lvl = 2; lvl <= opts.levels; ++lvl) {
            std::vector<std::vector<int>> next;
            for (const auto& path : frontier) {
                const PlateauNode& parent = t.nodes_.at(path);
                t.nodes_.emplace(null_path(path), make_null_child(parent, *parent.q_c));
                int idx = 1;
                for (const Word& r : t.ref_words_) {
                    PlateauNode child = make_pullback_child(parent, r, idx, opts.precision_bits);
                    next.push_back(child.path);
                    t.nodes_.emplace(child.path, std::move(child));
                    ++idx;
                }
            }
            frontier = std::move(next);
        }
        return t;
    }

    const Options& options() const { return opts_; }
    Alphabet alphabet() const { return Alphabet(opts_.M); }
    const BaseEnclosure& komornik_loreti_base() const { return qkl_; }
    const std::vector<Word>& reference_words() const { return ref_words_; }

    const PlateauNode& root() const { return nodes_.at({}); }

    const PlateauNode* find(const std::vector<int>& path) const {
        auto it = nodes_.find(path);
        return it == nodes_.end() ? nullptr : &it->second;
    }

    std::vector<const PlateauNode*> children(const std::vector<int>& path) const {
        std::vector<const PlateauNode*> out;
        for (int i = 0;; ++i) {
            std::vector<int> p = path;
            p.push_back(i);
            const PlateauNode* n = find(p);
            if (!n) {
                if (i == 0) continue;  // nodes below null intervals do not exist
                break;
            }
            out.push_back(n);
        }
        return out;
    }

    std::vector<const PlateauNode*> all_nodes() const {
        std::vector<const PlateauNode*> out;
        out.reserve(nodes_.size());
        for (const auto& [p, n] : nodes_) out.push_back(&n);
        std::sort(out.begin(), out.end(), [](const PlateauNode* x, const PlateauNode* y) {
            if (x->path.size() != y->path.size()) return x->path.size() < y->path.size();
            return x->path < y->path;
        });
        return out;
    }

private:
    explicit PlateauTree(const Options& opts)
        : opts_(opts), qkl_(komornik_loreti(Alphabet(opts.M), opts.precision_bits)) {}

    static std::vector<int> null_path(const std::vector<int>& p) {
        std::vector<int> q = p;
        q.push_back(0);
        return q;
    }

    Options opts_;
    BaseEnclosure qkl_;
    std::vector<Word> ref_words_;
    std::map<std::vector<int>, PlateauNode> nodes_;
};

// Maximal chain of tree nodes whose interval contains q under the requested
// endpoint convention, root first.  Empty result means q escapes even the
// root under that convention.
inline std::vector<const PlateauNode*> smallest_plateau_containing(const PlateauTree& tree,
                                                                   const BaseEnclosure& q,
                                                                   EndpointMode mode) {
    std::vector<const PlateauNode*> chain;
    const PlateauNode& root = tree.root();
    Ordering right = compare_bases(q, root.q_R);
    bool in_root = mode == EndpointMode::HalfOpenRight ? right != Ordering::Greater
                                                       : right == Ordering::Less;
    if (q.interval.hi <= 1 || !in_root) return chain;
    chain.push_back(&root);
    for (;;) {
        const PlateauNode* cur = chain.back();
        if (cur->is_null) break;
        const PlateauNode* next = nullptr;
        for (const PlateauNode* c : tree.children(cur->path)) {
            if (node_contains(*c, q, mode)) {
                next = c;
                break;
            }
        }
        if (!next) break;
        chain.push_back(next);
    }
    return chain;
}

// ---------------------------------------------------------------------------
// Membership classification

namespace detail {

// Two-sided shift condition on x: complement(x) REL sigma^n(x) REL x for all
// n = 1..depth, strict or weak.  Exact for eventually periodic sequences.
struct ShiftCheck {
    Validity verdict;
    long witness = 0;
};

inline ShiftCheck two_sided_shift_condition(const DigitSeq& x, bool strict, long depth) {
    int M = x.alphabet().M;
    auto form = x.eventually_periodic_form();
    long avail = x.is_finite() ? x.finite_length() : -1;
    long shifts = depth;
    long scan = depth + 64;
    bool exhaustive = false;
    if (form) {
        long cover = static_cast<long>(form->preamble.size() + form->period.size());
        exhaustive = cover <= depth;
        shifts = std::min(depth, cover);
        scan = 2 * cover + 4;  // decision bound for tails of one sequence
    }
    if (avail >= 0) shifts = std::min(shifts, avail - 1);
    bool all_decided = true;
    for (long n = 1; n <= shifts; ++n) {
        long local_scan = avail >= 0 ? std::min(scan, avail - n) : scan;
        int upper = 2, lower = 2;  // 2 = undecided, else -1/0/+1 of first difference
        for (long i = 1; i <= local_scan && (upper == 2 || lower == 2); ++i) {
            int s = x.digit_at(n + i);
            if (upper == 2) {
                int d = x.digit_at(i);
                if (s != d) upper = s < d ? -1 : 1;
            }
            if (lower == 2) {
                int c = M - x.digit_at(i);
                if (s != c) lower = s < c ? -1 : 1;
            }
        }
        if (form && local_scan >= scan) {
            if (upper == 2) upper = 0;  // certified equal tails
            if (lower == 2) lower = 0;
        }
        if (upper == 2 || lower == 2) {
            all_decided = false;
            continue;
        }
        bool ok_upper = strict ? upper < 0 : upper <= 0;
        bool ok_lower = strict ? lower > 0 : lower >= 0;
        if (!ok_upper || !ok_lower) return {Validity::No, n};
    }
    if (!all_decided) return {Validity::Unknown, 0};
    if (form && !exhaustive) return {Validity::Unknown, 0};
    if (avail >= 0 && shifts < depth) return {Validity::Unknown, 0};
    return {Validity::Yes, 0};
}

}  // namespace detail

struct Classification {
    Validity in_U = Validity::Unknown;
    Validity in_V = Validity::Unknown;
    Validity in_closure_U = Validity::Unknown;
    Validity in_B = Validity::Unknown;
    Validity in_B_left = Validity::Unknown;
    Validity in_B_right = Validity::Unknown;
    Validity in_C0 = Validity::Unknown;
    long depth = 0;
};

inline Classification classify(const PlateauTree& tree, const BaseEnclosure& q, long depth = 1024) {
    Classification out;
    out.depth = depth;
    Alphabet a = tree.alphabet();
    if (q.alphabet != a) throw AlphabetMismatch();

    bool is_top = q.is_point() && q.interval.lo == a.M + 1;
    if (!is_top && q.defining_seq) {
        // alpha(M+1) = M^inf
        auto f = q.defining_seq->eventually_periodic_form();
        is_top = f && f->preamble.empty() && f->period == std::vector<int>{a.M};
    }

    // --- U and V via the two-sided shift inequalities on alpha(q)
    if (is_top) {
        out.in_U = out.in_V = Validity::Yes;
    } else if (q.defining_seq &&
               (q.defining_seq->is_lambda_seq() || q.defining_seq->dvk_seed())) {
        // complement-doubling points and the smallest univoque base are
        // univoque; the finite-depth scan below would report Unknown
        out.in_U = out.in_V = Validity::Yes;
    } else {
        std::optional<DigitSeq> alpha;
        if (q.defining_seq) {
            alpha = q.defining_seq;
        } else {
            try {
                alpha = DigitSeq::finite(quasi_greedy_alpha(q, depth + 96));
            } catch (const PrecisionExhausted&) {
                alpha.reset();
            }
        }
        if (alpha) {
            bool capped = !alpha->eventually_periodic_form();
            auto u = detail::two_sided_shift_condition(*alpha, true, depth);
            auto v = detail::two_sided_shift_condition(*alpha, false, depth);
            out.in_U = capped && u.verdict == Validity::Yes ? Validity::Unknown : u.verdict;
            out.in_V = capped && v.verdict == Validity::Yes ? Validity::Unknown : v.verdict;
            if (out.in_U == Validity::Yes) out.in_V = Validity::Yes;
        }
    }

    // --- C0: the base's expansion is a complement-doubling sequence matching
    // a node of the tree (or the smallest univoque base itself)
    if (q.defining_seq) {
        if (q.defining_seq->is_lambda_seq()) {
            out.in_C0 = Validity::Yes;
        } else if (auto seed = q.defining_seq->dvk_seed()) {
            out.in_C0 = Validity::No;
            for (const PlateauNode* n : tree.all_nodes())
                if (n->generating_word && *n->generating_word == *seed) {
                    out.in_C0 = Validity::Yes;
                    break;
                }
            if (out.in_C0 == Validity::No) out.in_C0 = Validity::Unknown;  // beyond the tree
        } else if (q.defining_seq->eventually_periodic_form()) {
            out.in_C0 = Validity::No;  // doubling sequences are never eventually periodic
        }
    } else if (is_top) {
        out.in_C0 = Validity::No;
    }

    // --- positional flags from the enumerated level-1 plateaus
    Ordering vs_kl = compare_bases(q, tree.komornik_loreti_base());
    if (vs_kl != Ordering::Greater) {
        out.in_B = out.in_B_left = out.in_B_right = Validity::No;
        if (vs_kl == Ordering::Less) out.in_closure_U = Validity::No;
        else out.in_closure_U = Validity::Yes;  // the smallest univoque base
        return out;
    }
    bool in_plateau = false;
    for (const PlateauNode* n : tree.children({})) {
        if (n->is_null) continue;
        Ordering l = compare_bases(q, n->q_L);
        if (l == Ordering::Less) break;  // children sorted by q_L
        Ordering r = compare_bases(q, n->q_R);
        if (r == Ordering::Greater) continue;
        in_plateau = true;
        out.in_B = Validity::No;
        out.in_B_left = l == Ordering::Equal ? Validity::Yes : Validity::No;
        out.in_B_right = r == Ordering::Equal ? Validity::Yes : Validity::No;
        if (l == Ordering::Equal) out.in_closure_U = Validity::Yes;  // plateau left endpoint
        break;
    }
    if (!in_plateau) {
        out.in_B = out.in_B_left = out.in_B_right = Validity::Yes;
    }

    if (out.in_closure_U == Validity::Unknown) {
        if (out.in_U == Validity::Yes)
            out.in_closure_U = Validity::Yes;
        else if (out.in_C0 == Validity::Yes)
            out.in_closure_U = Validity::Yes;
        else {
            // strictly inside a null interval there are no univoque bases
            for (const PlateauNode* n : tree.all_nodes()) {
                if (!n->is_null) continue;
                if (compare_bases(q, n->q_L) == Ordering::Greater &&
                    compare_bases(q, n->q_R) == Ordering::Less) {
                    out.in_closure_U = Validity::No;
                    break;
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Induced base map between a plateau and the reference parameter range

namespace detail {

inline DigitSeq alpha_seq_of(const BaseEnclosure& q) {
    if (q.defining_seq) return *q.defining_seq;
    throw NotInV("base carries no expansion sequence; classify it first");
}

// Enclosure of any base whose expansion extends the given finite prefix: the
// partial sum underestimates pi and the partial sum plus tail overestimates
// it, so the respective roots of "value = 1" bracket the base.
inline BaseEnclosure base_from_alpha_prefix(Alphabet a, const Word& prefix, unsigned bits) {
    long n = prefix.size();
    int M = a.M;
    auto value = [&](const Rational& q, bool with_tail) {
        Rational inv = Rational(1) / q;
        Rational p = inv, s(0);
        for (long i = 0; i < n; ++i) {
            if (prefix[i]) s += Rational(prefix[i]) * p;
            p *= inv;
        }
        if (with_tail) s += Rational(M) * p * q / (q - 1);
        return s;
    };
    Rational target = pow2(-static_cast<long>(bits));
    // Bracket for the decreasing map q -> value(q); returns [lo,hi] with
    // value(lo) > 1 >= value(hi), or the stated fallbacks at the range ends.
    auto root_bracket = [&](bool with_tail) {
        Rational hi(M + 1);
        if (value(hi, with_tail) > 1) return std::make_pair(hi, hi);
        Rational lo(0);
        bool found = false;
        for (int k = 1; k <= 96 && !found; ++k) {
            lo = Rational(1) + pow2(-k);
            found = value(lo, with_tail) > 1;
        }
        if (!found) return std::make_pair(Rational(1), Rational(1));
        while (hi - lo > target) {
            Rational mid = (lo + hi) / 2;
            (value(mid, with_tail) > 1 ? lo : hi) = mid;
        }
        return std::make_pair(lo, hi);
    };
    Rational lower = root_bracket(false).first;  // partial root <= base
    Rational upper = root_bracket(true).second;  // tail root >= base
    BaseEnclosure out(a, RationalInterval(lower, upper));
    out.precision_bits = bits;
    return out;
}

}  // namespace detail

// Image of q under the induced base map of node J: the reference base whose
// expansion is the bit image of alpha(q).
inline BaseEnclosure phi_hat(const BaseEnclosure& q, const PlateauNode& J,
                             unsigned precision_bits = kDefaultPrecisionBits) {
    if (!J.generating_word) throw NotInPlateau("node has no generating word");
    if (!(compare_bases(q, J.q_L) == Ordering::Greater &&
          compare_bases(q, J.q_R) != Ordering::Greater))
        throw NotInPlateau("base lies outside (q_L, q_R]");
    DigitSeq alpha = detail::alpha_seq_of(q);
    PhiAutomaton aut(*J.generating_word);

    if (auto seed = alpha.dvk_seed(); seed && *seed == *J.generating_word) {
        // the relative complement-doubling point maps to the smallest
        // univoque base of the reference family
        return komornik_loreti(Alphabet(1), precision_bits);
    }

    auto u = detail::two_sided_shift_condition(alpha, false, 512);
    if (u.verdict == Validity::No) throw NotInV("alpha(q) violates the weak shift condition");

    if (alpha.eventually_periodic_form()) {
        BlockSeq blocks = parse_blocks(alpha, aut, 1);
        DigitSeq bits = phi_forward(blocks);
        return base_from_alpha(bits, precision_bits);
    }
    // lazily generated expansion: emit as many certified bits as requested
    long n_blocks = 2 * static_cast<long>(precision_bits) + 32;
    BlockSeq blocks = parse_blocks(alpha, aut, n_blocks);
    DigitSeq bits = phi_forward(blocks);
    return detail::base_from_alpha_prefix(Alphabet(1), bits.prefix(n_blocks), precision_bits);
}

// Empirical exponent of the induced base map between two bases of the
// plateau, log of the image gap over log of the gap.  Diagnostic only: the
// continuity estimates involve unspecified constants, so nothing stronger
// than positivity is ever asserted on this value.
inline double holder_exponent_estimate(const BaseEnclosure& q1, const BaseEnclosure& q2,
                                       const PlateauNode& J, unsigned bits = 96) {
    BaseEnclosure i1 = phi_hat(q1, J, bits);
    BaseEnclosure i2 = phi_hat(q2, J, bits);
    double dq = std::abs(q2.interval.mid().get_d() - q1.interval.mid().get_d());
    double di = std::abs(i2.interval.mid().get_d() - i1.interval.mid().get_d());
    if (dq <= 0 || di <= 0) return 0.0;
    return std::log(di) / std::log(dq);
}

// Inverse of the induced base map: reference base back into the plateau.
inline BaseEnclosure phi_hat_inverse(const BaseEnclosure& q_star, const PlateauNode& J,
                                     unsigned precision_bits = kDefaultPrecisionBits) {
    if (!J.generating_word) throw NotInPlateau("node has no generating word");
    if (q_star.alphabet.M != 1) throw NotInVStar("reference bases use the alphabet {0,1}");
    DigitSeq alpha_star = q_star.defining_seq
                              ? *q_star.defining_seq
                              : DigitSeq::finite(quasi_greedy_alpha(
                                    q_star, 2 * static_cast<long>(precision_bits) + 32));
    PhiAutomaton aut(*J.generating_word);

    if (alpha_star.is_lambda_seq())
        return base_from_alpha(DigitSeq::dvk_doubling(*J.generating_word), precision_bits);

    auto v = detail::two_sided_shift_condition(alpha_star, false, 512);
    if (v.verdict == Validity::No) throw NotInVStar("alpha* violates the weak shift condition");

    if (alpha_star.eventually_periodic_form()) {
        BlockSeq blocks = phi_inverse(alpha_star, aut, 1);
        DigitSeq digits = blocks_to_digits(blocks);
        return base_from_alpha(digits, precision_bits);
    }
    long n_blocks = 2 * static_cast<long>(precision_bits) + 32;
    BlockSeq blocks = phi_inverse(alpha_star, aut, n_blocks);
    DigitSeq digits = blocks_to_digits(blocks);
    return detail::base_from_alpha_prefix(J.q_L.alphabet, digits.prefix(n_blocks * aut.m()),
                                          precision_bits);
}

}  // namespace univoque
