#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "univoque/entropy.hpp"

namespace univoque {

// A certified Hausdorff-dimension (or local dimension) value in [0,1].
struct DimValue {
    RationalInterval value;
    enum class Basis { ExactFormula, PlateauBracket, Zero } basis = Basis::Zero;
    std::string witness;

    std::string to_string() const {
        std::string b = basis == Basis::ExactFormula  ? "exact-formula"
                        : basis == Basis::PlateauBracket ? "plateau-bracket"
                                                         : "zero";
        std::string s = plus_minus_string(value, 10) + " (" + b;
        if (!witness.empty()) s += ", " + witness;
        return s + ")";
    }
};

enum class Side { Left, Right, TwoSided };

// Shared context for dimension queries.  The descent below the root runs at
// the entropy evaluator's enumeration resolution (both indexes are extended
// to their caps up front), so a base never gets attributed to a coarser
// plateau than the staircase positioning would use.  Virtual nodes outside
// the built tree are constructed on demand and cached.
class DimensionContext {
public:
    DimensionContext(const PlateauTree& tree, const EntropyEvaluator& entropy,
                     int depth_budget = 8)
        : tree_(&tree), entropy_(&entropy), depth_budget_(depth_budget) {
        entropy.warm_up();
        level1_ = entropy.level1_words_snapshot();
        ref_words_ = entropy.reference_words_snapshot();
    }

    const PlateauTree& tree() const { return *tree_; }
    const EntropyEvaluator& entropy() const { return *entropy_; }
    int depth_budget() const { return depth_budget_; }

    // Candidate children of a node during descent: the null interval first,
    // then the generated plateaus in ascending order of left endpoint.
    // Handles carry only the expansion sequences of their endpoints; all
    // positioning comparisons go through those, and full nodes (with the
    // doubling point, which needs a series bisection) are materialized only
    // when the descent actually enters a child.
    struct ChildHandle {
        bool is_null;
        std::optional<Word> word;  // generating word, absent for null children
        std::optional<Word> ref;   // reference word, for pullback children
        std::optional<DigitSeq> alpha_L;  // absent: child starts at the parent's left end
        DigitSeq alpha_R;
    };

    std::vector<ChildHandle> child_handles(const PlateauNode& node) const {
        std::vector<ChildHandle> out;
        if (node.is_null) return out;
        if (node.path.empty()) {
            // the root null interval (1, q_KL]
            out.push_back({true, std::nullopt, std::nullopt, std::nullopt,
                           DigitSeq::thue_morse_lambda(tree_->alphabet())});
            for (const Word& w : level1_)
                out.push_back({false, w, std::nullopt, alpha_of_left_endpoint(w),
                               alpha_of_right_endpoint(w)});
            return out;
        }
        if (!node.generating_word) return out;
        // the null child runs from the parent's left endpoint to its
        // complement-doubling point
        out.push_back({true, std::nullopt, std::nullopt, std::nullopt,
                       DigitSeq::dvk_doubling(*node.generating_word)});
        PhiAutomaton aut(*node.generating_word);
        for (const Word& r : ref_words_) {
            Word w = pullback_plateau(r, aut);
            out.push_back({false, w, r, alpha_of_left_endpoint(w), alpha_of_right_endpoint(w)});
        }
        return out;
    }

    // Full node for a handle chosen during descent.
    const PlateauNode* node_for(const PlateauNode& parent, const ChildHandle& h,
                                int index) const {
        std::lock_guard<std::mutex> lock(mu_);
        std::string key = (h.is_null ? "0" : h.word->to_string()) + "|" +
                          (parent.generating_word ? parent.generating_word->to_string() : "root");
        auto it = node_cache_.find(key);
        if (it != node_cache_.end()) return &it->second;
        PlateauNode n = h.is_null
                            ? make_null_child(parent, parent.path.empty()
                                                          ? tree_->komornik_loreti_base()
                                                          : *parent.q_c)
                            : make_level1_node(*h.word, index, tree_->options().precision_bits,
                                               /*with_gf=*/false);
        if (!h.is_null) {
            n.path = parent.path;
            n.path.push_back(index);
            n.ref_word = h.ref;
            n.level = parent.level + 1;
        }
        return &node_cache_.emplace(key, std::move(n)).first->second;
    }

    // Order of a query base against a handle endpoint.  Lexicographic when
    // the query carries its expansion; a single cached polynomial sign for
    // rational points against eventually periodic endpoints; a cached
    // root enclosure only for the aperiodic endpoints.
    Ordering cmp(const BaseEnclosure& q, const DigitSeq& alpha) const {
        if (q.defining_seq) {
            LexResult r = lex_compare(*q.defining_seq, alpha);
            if (r.kind == LexResult::Less) return Ordering::Less;
            if (r.kind == LexResult::Greater) return Ordering::Greater;
            if (r.kind == LexResult::Equal) return Ordering::Equal;
            throw UndecidableAtPrecision("sequence order undecided");
        }
        auto form = alpha.eventually_periodic_form();
        if (q.is_point() && form) {
            const Poly& n = endpoint_poly(alpha, *form);
            Rational v = n.eval(q.interval.lo);
            return v == 0 ? Ordering::Equal : v > 0 ? Ordering::Less : Ordering::Greater;
        }
        return compare_bases(q, endpoint_base(alpha));
    }

    // Base for a handle endpoint, materialized and cached on demand (used by
    // the interval-dimension sampler).
    const BaseEnclosure& endpoint_base(const DigitSeq& alpha) const {
        std::lock_guard<std::mutex> lock(mu_);
        std::string key = alpha.describe();
        auto it = base_cache_.find(key);
        if (it != base_cache_.end()) return it->second;
        return base_cache_
            .emplace(key, base_from_alpha(alpha, tree_->options().precision_bits))
            .first->second;
    }

private:
    const Poly& endpoint_poly(const DigitSeq& alpha, const EvPeriodic& form) const {
        std::lock_guard<std::mutex> lock(mu_);
        std::string key = alpha.describe();
        auto it = poly_cache_.find(key);
        if (it != poly_cache_.end()) return it->second;
        return poly_cache_.emplace(key, univoque::detail::pi_minus_one_sign_poly(form))
            .first->second;
    }

    const PlateauTree* tree_;
    const EntropyEvaluator* entropy_;
    int depth_budget_;
    std::vector<Word> level1_;
    std::vector<Word> ref_words_;
    mutable std::mutex mu_;
    mutable std::map<std::string, PlateauNode> node_cache_;
    mutable std::map<std::string, BaseEnclosure> base_cache_;
    mutable std::map<std::string, Poly> poly_cache_;
};

struct ChainResult {
    std::vector<const PlateauNode*> chain;  // root first; empty = not covered
    bool budget_exhausted = false;
    bool at_child_left_endpoint = false;  // q equals q_L of some child (closure(U) \ U)
    bool at_dvk_point = false;            // q equals the q_c ending a null interval
};

// Maximal chain of (possibly virtual) relative plateaus containing q under
// the endpoint convention, descending past the built tree via pullbacks.
inline ChainResult plateau_chain(const DimensionContext& ctx, const BaseEnclosure& q,
                                 EndpointMode mode) {
    ChainResult res;
    const PlateauNode& root = ctx.tree().root();
    Ordering right = compare_bases(q, root.q_R);
    bool in_root = mode == EndpointMode::HalfOpenRight ? right != Ordering::Greater
                                                       : right == Ordering::Less;
    if (q.interval.hi <= 1 || !in_root) return res;
    res.chain.push_back(&root);
    for (int level = 0; level < ctx.depth_budget(); ++level) {
        const PlateauNode* cur = res.chain.back();
        if (cur->is_null) break;
        const PlateauNode* next = nullptr;
        int idx = -1;
        for (const auto& h : ctx.child_handles(*cur)) {
            ++idx;
            if (h.alpha_L) {
                Ordering l = ctx.cmp(q, *h.alpha_L);
                if (l == Ordering::Equal && !h.is_null) res.at_child_left_endpoint = true;
                if (l == Ordering::Less) break;  // children sorted by left endpoint
                if (l != Ordering::Greater) continue;
            }
            Ordering r = ctx.cmp(q, h.alpha_R);
            bool inside = mode == EndpointMode::HalfOpenRight ? r != Ordering::Greater
                                                              : r == Ordering::Less;
            if (h.is_null && r == Ordering::Equal) res.at_dvk_point = true;
            if (inside) {
                next = ctx.node_for(*cur, h, idx);
                break;
            }
        }
        if (!next) return res;
        res.chain.push_back(next);
        if (next->is_null) return res;
    }
    res.budget_exhausted = res.chain.size() >= static_cast<size_t>(ctx.depth_budget());
    return res;
}

namespace detail {

inline RationalInterval log_of_base(const BaseEnclosure& q, unsigned bits) {
    BaseEnclosure r = q;
    if (!q.is_point() && q.defining_seq) r = q.refined(bits);
    return log_enclosure(r.interval, bits);
}

inline RationalInterval clamp_unit(const RationalInterval& v) {
    return {std::max(v.lo, Rational(0)), std::min(v.hi, Rational(1))};
}

inline DimValue::Basis basis_from_entropy(EntropyValue::Basis b) {
    switch (b) {
        case EntropyValue::Basis::ExactZero: return DimValue::Basis::Zero;
        case EntropyValue::Basis::Bracket: return DimValue::Basis::PlateauBracket;
        default: return DimValue::Basis::ExactFormula;
    }
}

// h(relative set of J at q) / log q with outward rounding.
inline DimValue dim_from_entropy(const DimensionContext& ctx, const PlateauNode& J,
                                 const BaseEnclosure& q, const Rational& tol) {
    unsigned bits = ctx.tree().options().precision_bits;
    EntropyValue h = ctx.entropy().entropy_HJ(J, q, tol);
    if (h.value.hi == 0)
        return {RationalInterval(Rational(0)), DimValue::Basis::Zero,
                "J=path " + J.path_string()};
    RationalInterval lq = log_of_base(q, bits);
    return {clamp_unit(h.value / lq), basis_from_entropy(h.basis), "J=path " + J.path_string()};
}

}  // namespace detail

// Local dimension of the set of univoque bases near q: left, right, or
// two-sided.  Exact zeros at complement-doubling points and inside null
// intervals; h(relative set)/log q elsewhere, with honest brackets where the
// enumeration horizon cuts off.
inline DimValue local_dim(const DimensionContext& ctx, const BaseEnclosure& q, Side side,
                          const Rational& tol) {
    Alphabet a = ctx.tree().alphabet();
    int M = a.M;

    bool is_top = q.is_point() && q.interval.lo == M + 1;
    if (!is_top && q.defining_seq) {
        auto f = q.defining_seq->eventually_periodic_form();
        is_top = f && f->preamble.empty() && f->period == std::vector<int>{M};
    }
    if (is_top) {
        if (side == Side::Right)
            return {RationalInterval(Rational(0)), DimValue::Basis::Zero, "right of M+1"};
        return {RationalInterval(Rational(1)), DimValue::Basis::ExactFormula, "q = M+1"};
    }

    if (side == Side::TwoSided) {
        DimValue l = local_dim(ctx, q, Side::Left, tol);
        DimValue r = local_dim(ctx, q, Side::Right, tol);
        DimValue out;
        out.value = {std::max(l.value.lo, r.value.lo), std::max(l.value.hi, r.value.hi)};
        out.basis = l.value.hi >= r.value.hi ? l.basis : r.basis;
        out.witness = l.value.hi >= r.value.hi ? l.witness : r.witness;
        return out;
    }

    EndpointMode mode =
        side == Side::Left ? EndpointMode::HalfOpenRight : EndpointMode::Open;
    ChainResult loc = plateau_chain(ctx, q, mode);
    if (loc.chain.empty())
        return {RationalInterval(Rational(0)), DimValue::Basis::Zero, "outside (1, M+1]"};

    const PlateauNode* deepest = loc.chain.back();

    if (deepest->is_null) {
        // inside a null interval: only its right endpoint meets the univoque
        // set, so the local dimension vanishes on both sides
        std::string w = loc.at_dvk_point ? "complement-doubling point of " +
                                               deepest->path_string()
                                         : "interior of null interval " + deepest->path_string();
        return {RationalInterval(Rational(0)), DimValue::Basis::Zero, w};
    }

    if (side == Side::Right && loc.at_child_left_endpoint)
        return {RationalInterval(Rational(0)), DimValue::Basis::Zero,
                "left endpoint of a plateau"};

    if (loc.budget_exhausted) {
        // contained in plateaus through the whole budget: report the
        // vanishing upper bound log 2/(m log q_R) of the deepest level
        unsigned bits = ctx.tree().options().precision_bits;
        RationalInterval l2 = log_enclosure(Rational(2), bits);
        RationalInterval lr = detail::log_of_base(deepest->q_R, bits);
        RationalInterval hi = l2 / (Rational(deepest->word_length()) * lr);
        return {RationalInterval(Rational(0), hi.hi), DimValue::Basis::Zero,
                "nested through level " + std::to_string(deepest->level) + " (depth budget)"};
    }

    return detail::dim_from_entropy(ctx, *deepest, q, tol);
}

inline DimValue dim_W(const DimensionContext& ctx, const BaseEnclosure& q, const Rational& tol) {
    return local_dim(ctx, q, Side::Left, tol);
}

// Hausdorff dimension of the univoque-base set within [t1, t2].
inline DimValue interval_dim(const DimensionContext& ctx, const BaseEnclosure& t1,
                             const BaseEnclosure& t2, const Rational& tol) {
    if (compare_bases(t1, t2) != Ordering::Less) throw Error("need t1 < t2");
    unsigned bits = ctx.tree().options().precision_bits;

    // smallest (virtual) plateau containing [t1, t2]
    const PlateauNode* J = &ctx.tree().root();
    for (int level = 0; level < ctx.depth_budget(); ++level) {
        const PlateauNode* next = nullptr;
        bool in_null = false;
        int idx = -1;
        for (const auto& h : ctx.child_handles(*J)) {
            ++idx;
            if (h.alpha_L && ctx.cmp(t1, *h.alpha_L) == Ordering::Less) continue;
            if (ctx.cmp(t2, h.alpha_R) == Ordering::Greater) continue;
            if (h.is_null) {
                in_null = true;
                break;
            }
            next = ctx.node_for(*J, h, idx);
            break;
        }
        if (in_null) {
            // within a null interval the univoque set is at most one point
            return {RationalInterval(Rational(0)), DimValue::Basis::Zero,
                    "inside a null interval of " + J->path_string()};
        }
        if (!next) break;
        J = next;
    }
    if (!J->path.empty() && J->q_c && compare_bases(t2, *J->q_c) != Ordering::Greater)
        return {RationalInterval(Rational(0)), DimValue::Basis::Zero,
                "below the complement-doubling point of " + J->path_string()};

    // sample points: endpoints of children of J meeting [t1, t2], plus the
    // interval ends themselves when they carry expansions
    std::vector<const BaseEnclosure*> samples;
    std::vector<BaseEnclosure> owned;
    owned.reserve(64);
    auto add_if_inside = [&](const BaseEnclosure& p) {
        if (compare_bases(p, t1) == Ordering::Less || compare_bases(p, t2) == Ordering::Greater)
            return;
        // the relative entropy is defined on (q_L, q_R] and vanishes toward
        // the left endpoint, so q_L itself contributes nothing
        if (!J->path.empty() && compare_bases(p, J->q_L) != Ordering::Greater) return;
        owned.push_back(p);
    };
    for (const auto& h : ctx.child_handles(*J)) {
        if (h.is_null) continue;
        // sampling density: deep reference words add endpoints whose values
        // are already squeezed against the right end by the earlier ones,
        // so cap the per-child word length instead of materializing all
        if (h.ref && h.ref->size() > 8) continue;
        if (!h.ref && h.word && h.word->size() > 10) continue;
        if (ctx.cmp(t2, *h.alpha_L) == Ordering::Less) break;
        if (ctx.cmp(t1, h.alpha_R) == Ordering::Greater) continue;
        add_if_inside(ctx.endpoint_base(*h.alpha_L));
        add_if_inside(ctx.endpoint_base(h.alpha_R));
    }
    if (t1.defining_seq) add_if_inside(t1);
    if (t2.defining_seq) add_if_inside(t2);
    std::sort(owned.begin(), owned.end(), [](const BaseEnclosure& a, const BaseEnclosure& b) {
        return compare_bases(a, b) == Ordering::Less;
    });
    for (const BaseEnclosure& b : owned) samples.push_back(&b);

    RationalInterval best{Rational(0)};
    std::string best_witness = "no samples";
    bool any = false;
    for (const BaseEnclosure* s : samples) {
        EntropyValue h = ctx.entropy().entropy_HJ(*J, *s, tol);
        if (h.value.hi == 0) continue;
        RationalInterval v = detail::clamp_unit(h.value / detail::log_of_base(*s, bits));
        if (!any || v.lo > best.lo) {
            best = v;
            best_witness = "J=path " + J->path_string();
            any = true;
        }
    }
    if (!any)
        return {RationalInterval(Rational(0)), DimValue::Basis::Zero,
                "no positive-entropy samples in [t1, t2]"};

    // upper bound: between consecutive samples the relative entropy is at
    // most its value at the right sample, while log q is at least its value
    // at the left one
    Rational hi = best.hi;
    std::vector<const BaseEnclosure*> pts;
    pts.push_back(&t1);
    for (const BaseEnclosure* s : samples) pts.push_back(s);
    pts.push_back(&t2);
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        // the relative entropy is nondecreasing and log q increasing, so on
        // [u,v] the ratio is at most h(v)/log(u)
        RationalInterval hleft = detail::log_of_base(*pts[i], bits);
        EntropyValue hr = ctx.entropy().entropy_HJ(
            *J, compare_bases(*pts[i + 1], J->q_R) == Ordering::Greater ? J->q_R : *pts[i + 1],
            tol);
        RationalInterval seg = hr.value / hleft;
        hi = std::max(hi, std::min(seg.hi, Rational(1)));
    }
    return {RationalInterval(best.lo, hi), DimValue::Basis::ExactFormula,
            best_witness};
}

struct BifurcationDims {
    DimValue dim_B;       // log 2 / (m log q_R)
    DimValue dim_excess;  // log 2 / (3m log p0)
    BaseEnclosure p0;
};

// Dimension of the relative bifurcation set of J and of its complement
// within the local univoque set; p0 is the base with expansion
// a+ (comp a)^2 ((comp a+) a a+)^inf.
inline BifurcationDims bifurcation_dims(const PlateauNode& J,
                                        unsigned precision_bits = kDefaultPrecisionBits) {
    if (!J.generating_word) throw NotInPlateau("bifurcation dims need a generated plateau");
    const Word& w = *J.generating_word;
    long m = w.size();
    Word wp = w.incremented_last();
    Word pre = wp.concat(w.complement()).concat(w.complement());
    Word per = wp.complement().concat(w).concat(wp);
    BaseEnclosure p0 =
        base_from_alpha(DigitSeq::eventually_periodic(pre, per), precision_bits);

    RationalInterval l2 = log_enclosure(Rational(2), precision_bits);
    RationalInterval lqR = detail::log_of_base(J.q_R, precision_bits);
    RationalInterval lp0 = detail::log_of_base(p0, precision_bits);
    DimValue dim_B{detail::clamp_unit(l2 / (Rational(m) * lqR)), DimValue::Basis::ExactFormula,
                   "J=path " + J.path_string()};
    DimValue dim_excess{detail::clamp_unit(l2 / (Rational(3 * m) * lp0)),
                        DimValue::Basis::ExactFormula, "J=path " + J.path_string()};
    return {std::move(dim_B), std::move(dim_excess), std::move(p0)};
}

// Hausdorff dimension (in the dyadic symbolic metric) of the part of the
// relative set gained since the left endpoint: h(relative set)/log 2.
inline DimValue dj_function(const DimensionContext& ctx, const PlateauNode& J,
                            const BaseEnclosure& q, const Rational& tol) {
    unsigned bits = ctx.tree().options().precision_bits;
    EntropyValue h = ctx.entropy().entropy_HJ(J, q, tol);
    if (h.value.hi == 0)
        return {RationalInterval(Rational(0)), DimValue::Basis::Zero, "J=path " + J.path_string()};
    RationalInterval l2 = log_enclosure(Rational(2), bits);
    return {detail::clamp_unit(h.value / l2), detail::basis_from_entropy(h.basis),
            "J=path " + J.path_string()};
}

// Converts a symbolic dimension (dyadic metric) to the Euclidean dimension of
// the projected set: multiply by log 2/log q.
inline DimValue symbolic_to_euclidean(const DimValue& d, const BaseEnclosure& q,
                                      unsigned precision_bits = kDefaultPrecisionBits) {
    RationalInterval l2 = log_enclosure(Rational(2), precision_bits);
    RationalInterval lq = detail::log_of_base(q, precision_bits);
    DimValue out = d;
    out.value = detail::clamp_unit(d.value * (l2 / lq));
    return out;
}

// ---------------------------------------------------------------------------
// Window scan for the strongly univoque condition

struct StronglyUnivoqueReport {
    std::string base;
    Word alpha_prefix;
    std::vector<std::pair<long, long>> window_hits;  // (position, matched length)
    enum class Verdict { InUtilde, InUcheck, InWCandidate, Excluded } verdict;
    long witness = 0;  // violation position when Excluded
};

// Scans x against the two-sided alpha bounds to `depth`, recording where
// windows reproduce the alpha prefix or its complement.  Evidence with some
// window length never matched points to the strongly univoque set; matches
// persisting at every length up to k mark a difference-set candidate.
inline StronglyUnivoqueReport strongly_univoque_scan(const BaseEnclosure& q, const DigitSeq& x,
                                                     long depth, long k) {
    if (k < 1 || k > depth) throw Error("need 1 <= k <= depth");
    Word alpha = q.alpha_prefix(depth + k);
    int M = q.alphabet.M;
    StronglyUnivoqueReport rep{q.to_string(), alpha, {},
                               StronglyUnivoqueReport::Verdict::InUtilde, 0};

    long avail = x.is_finite() ? x.finite_length() : depth + k;
    auto xd = [&](long i) { return x.digit_at(i); };  // 1-based
    // first check the two-sided bound to depth
    for (long n = 0; n < depth; ++n) {
        for (long i = 1; n + i <= avail && i <= alpha.size(); ++i) {
            int s = xd(n + i), al = alpha[i - 1];
            if (s > al) {
                rep.verdict = StronglyUnivoqueReport::Verdict::Excluded;
                rep.witness = n;
                return rep;
            }
            if (s < al) break;
        }
        for (long i = 1; n + i <= avail && i <= alpha.size(); ++i) {
            int s = xd(n + i), cl = M - alpha[i - 1];
            if (s < cl) {
                rep.verdict = StronglyUnivoqueReport::Verdict::Excluded;
                rep.witness = n;
                return rep;
            }
            if (s > cl) break;
        }
    }

    // match lengths against the alpha prefix and its complement
    long best = 0;
    for (long n = 0; n + k <= depth; ++n) {
        long la = 0, lc = 0;
        while (n + la + 1 <= avail && la + 1 <= alpha.size() && xd(n + la + 1) == alpha[la]) ++la;
        while (n + lc + 1 <= avail && lc + 1 <= alpha.size() && xd(n + lc + 1) == M - alpha[lc])
            ++lc;
        long l = std::max(la, lc);
        best = std::max(best, l);
        if (l >= k) rep.window_hits.emplace_back(n, l);
    }
    rep.verdict = best >= k ? StronglyUnivoqueReport::Verdict::InWCandidate
                            : StronglyUnivoqueReport::Verdict::InUcheck;
    return rep;
}

}  // namespace univoque
