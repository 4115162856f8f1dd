#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "univoque/plateaux.hpp"

namespace univoque {

// Follower graph of the subshift whose length-l windows lie strictly between
// a bound word and its complement.  Vertices are (l-1)-windows, edges are
// allowed l-windows, labeled by their last digit.
struct FollowerGraph {
    Word bound;                        // the word b+ (upper window bound)
    int n_symbols = 0;                 // alphabet size of the underlying shift
    long l = 0;                        // window length
    std::vector<std::vector<int>> vertex_words;
    std::vector<std::vector<std::pair<int, int>>> succ;  // (target, label)

    long edge_count() const {
        long e = 0;
        for (const auto& s : succ) e += static_cast<long>(s.size());
        return e;
    }
};

namespace detail {

// DFS over windows of length l with digits drawn from 0..n_symbols-1,
// strictly between `low` and `high`, with an optional per-step transition
// filter.  Calls sink(window) for each allowed window.
inline void enumerate_windows(int n_symbols, long l, const std::vector<int>& low,
                              const std::vector<int>& high,
                              const std::function<bool(int, int)>& step_ok,
                              const std::function<void(const std::vector<int>&)>& sink) {
    std::vector<int> w;
    w.reserve(static_cast<size_t>(l));
    // tight flags: prefix still equal to the corresponding bound prefix
    auto rec = [&](auto&& self, bool tight_lo, bool tight_hi) -> void {
        long i = static_cast<long>(w.size());
        if (i == l) {
            if (!tight_lo && !tight_hi) sink(w);
            return;
        }
        for (int d = 0; d < n_symbols; ++d) {
            if (tight_hi && d > high[static_cast<size_t>(i)]) break;
            if (tight_lo && d < low[static_cast<size_t>(i)]) continue;
            if (i > 0 && step_ok && !step_ok(w.back(), d)) continue;
            w.push_back(d);
            self(self, tight_lo && d == low[static_cast<size_t>(i)],
                 tight_hi && d == high[static_cast<size_t>(i)]);
            w.pop_back();
        }
    };
    rec(rec, true, true);
}

inline FollowerGraph build_window_graph(const Word& bound, int n_symbols,
                                        const std::vector<int>& low, const std::vector<int>& high,
                                        const std::function<bool(int, int)>& step_ok) {
    long l = static_cast<long>(high.size());
    FollowerGraph g{bound, n_symbols, l, {}, {}};
    std::map<std::vector<int>, int> ids;
    auto vid = [&](const std::vector<int>& w) {
        auto it = ids.find(w);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(g.vertex_words.size());
        ids.emplace(w, id);
        g.vertex_words.push_back(w);
        g.succ.emplace_back();
        return id;
    };
    bool any = false;
    enumerate_windows(n_symbols, l, low, high, step_ok, [&](const std::vector<int>& w) {
        any = true;
        std::vector<int> u(w.begin(), w.end() - 1);
        std::vector<int> v(w.begin() + 1, w.end());
        int ui = vid(u), vi = vid(v);
        g.succ[static_cast<size_t>(ui)].emplace_back(vi, w.back());
    });
    if (!any) throw EmptySubshift();
    return g;
}

}  // namespace detail

// Subshift of allowed windows strictly between complement(bound) and bound.
inline FollowerGraph build_sft(const Word& bound_word) {
    Word low = bound_word.complement();
    bool strictly_above = false;
    for (long i = 0; i < bound_word.size(); ++i) {
        if (bound_word[i] != low[i]) {
            strictly_above = bound_word[i] > low[i];
            break;
        }
    }
    if (!strictly_above)
        throw Error("bound word must strictly exceed its complement: " + bound_word.to_string());
    return detail::build_window_graph(bound_word, bound_word.alphabet().M + 1, low.digits(),
                                      bound_word.digits(), nullptr);
}

namespace detail {

// Tarjan strongly connected components, iterative.
inline std::vector<int> strongly_connected_components(const FollowerGraph& g, int* count_out) {
    int n = static_cast<int>(g.succ.size());
    std::vector<int> idx(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    int next_index = 0, n_comp = 0;
    struct Frame {
        int v;
        size_t ei;
    };
    for (int s = 0; s < n; ++s) {
        if (idx[s] != -1) continue;
        std::vector<Frame> frames{{s, 0}};
        idx[s] = low[s] = next_index++;
        stack.push_back(s);
        on_stack[s] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.ei < g.succ[static_cast<size_t>(f.v)].size()) {
                int w = g.succ[static_cast<size_t>(f.v)][f.ei++].first;
                if (idx[w] == -1) {
                    idx[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], idx[w]);
                }
            } else {
                if (low[f.v] == idx[f.v]) {
                    for (;;) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp[w] = n_comp;
                        if (w == f.v) break;
                    }
                    ++n_comp;
                }
                int v = f.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    if (count_out) *count_out = n_comp;
    return comp;
}

}  // namespace detail

struct TransitivityReport {
    bool transitive = false;
    int nontrivial_components = 0;
    std::vector<int> component_of;
    std::vector<char> surviving;  // after iterated in/out-degree pruning
};

inline TransitivityReport is_transitive(const FollowerGraph& g) {
    TransitivityReport rep;
    int n = static_cast<int>(g.succ.size());
    int n_comp = 0;
    rep.component_of = detail::strongly_connected_components(g, &n_comp);

    // iterated pruning of vertices with no in- or out-edges
    rep.surviving.assign(static_cast<size_t>(n), 1);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<int> indeg(n, 0), outdeg(n, 0);
        for (int v = 0; v < n; ++v) {
            if (!rep.surviving[static_cast<size_t>(v)]) continue;
            for (auto [to, lab] : g.succ[static_cast<size_t>(v)]) {
                if (!rep.surviving[static_cast<size_t>(to)]) continue;
                ++outdeg[v];
                ++indeg[to];
            }
        }
        for (int v = 0; v < n; ++v) {
            if (rep.surviving[static_cast<size_t>(v)] && (indeg[v] == 0 || outdeg[v] == 0)) {
                rep.surviving[static_cast<size_t>(v)] = 0;
                changed = true;
            }
        }
    }

    // nontrivial components: more than one vertex, or a self-loop
    std::vector<int> size(n_comp, 0);
    std::vector<char> has_loop(n_comp, 0);
    for (int v = 0; v < n; ++v) {
        ++size[rep.component_of[static_cast<size_t>(v)]];
        for (auto [to, lab] : g.succ[static_cast<size_t>(v)])
            if (to == v) has_loop[rep.component_of[static_cast<size_t>(v)]] = 1;
    }
    int nontrivial = -1;
    for (int c = 0; c < n_comp; ++c)
        if (size[c] > 1 || has_loop[c]) {
            ++rep.nontrivial_components;
            nontrivial = c;
        }
    rep.transitive = rep.nontrivial_components == 1;
    if (rep.transitive)
        for (int v = 0; v < n; ++v)
            if (rep.surviving[static_cast<size_t>(v)] &&
                rep.component_of[static_cast<size_t>(v)] != nontrivial)
                rep.transitive = false;
    return rep;
}

namespace detail {

// Collatz-Wielandt bounds for one strongly connected component, using
// B = A + I to sidestep periodicity.  Valid for every positive vector.
inline RationalInterval cw_bounds(const std::vector<std::vector<int>>& adj,
                                  const std::vector<Rational>& v) {
    size_t n = adj.size();
    Rational lo, hi;
    bool first = true;
    for (size_t i = 0; i < n; ++i) {
        Rational bv = v[i];  // identity part
        for (int j : adj[i]) bv += v[static_cast<size_t>(j)];
        Rational ratio = bv / v[i];
        if (first) {
            lo = hi = ratio;
            first = false;
        } else {
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    return {lo - 1, hi - 1};
}

inline RationalInterval scc_spectral_radius(const std::vector<std::vector<int>>& adj,
                                            const Rational& tol) {
    size_t n = adj.size();
    // double-precision power iteration on A + I until the estimated bounds
    // stabilize; the exact certificate below holds for any positive vector
    double target = std::min(tol.get_d() / 8, 1e-13);
    std::vector<double> v(n, 1.0), w(n, 0.0);
    for (int it = 0; it < 60000; ++it) {
        double mx = 0;
        for (size_t i = 0; i < n; ++i) {
            double s = v[i];
            for (int j : adj[i]) s += v[static_cast<size_t>(j)];
            w[i] = s;
            mx = std::max(mx, s);
        }
        if ((it & 15) == 15 || it + 1 == 60000) {
            double rlo = 1e300, rhi = 0;
            for (size_t i = 0; i < n; ++i) {
                double r = w[i] / v[i];
                rlo = std::min(rlo, r);
                rhi = std::max(rhi, r);
            }
            if (rhi - rlo < target) {
                for (size_t i = 0; i < n; ++i) v[i] = w[i] / mx;
                break;
            }
        }
        for (size_t i = 0; i < n; ++i) v[i] = w[i] / mx;
    }
    std::vector<Rational> rv(n);
    for (size_t i = 0; i < n; ++i) {
        Rational r(v[i]);
        rv[i] = r > Rational(1, 1000000000) ? r : Rational(1, 1000000000);
    }
    RationalInterval bounds = cw_bounds(adj, rv);
    // limited exact refinement on a dyadic grid when the float vector was
    // not good enough; the result stays an honest enclosure either way
    long grid_bits = 64;
    {
        Rational t = tol;
        while (t < 1 && grid_bits < 512) {
            t *= 2;
            grid_bits += 1;
        }
        grid_bits += 32;
    }
    Rational grid = pow2(-grid_bits);
    for (int it = 0; it < 256 && bounds.width() > tol; ++it) {
        std::vector<Rational> nv(n);
        Rational mx(0);
        for (size_t i = 0; i < n; ++i) {
            Rational s = rv[i];
            for (int j : adj[i]) s += rv[static_cast<size_t>(j)];
            nv[i] = s;
            mx = std::max(mx, s);
        }
        for (size_t i = 0; i < n; ++i) {
            Rational x = nv[i] / mx;
            // snap down to the grid, keeping positivity
            Integer k;
            Rational scaled = x / grid;
            mpz_fdiv_q(k.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
            Rational snapped = Rational(k) * grid;
            nv[i] = snapped > 0 ? snapped : grid;
        }
        rv = std::move(nv);
        bounds = cw_bounds(adj, rv);
    }
    // a strongly connected component carries a cycle
    if (bounds.lo < 1) bounds.lo = 1;
    return bounds;
}

}  // namespace detail

// Certified enclosure of the Perron root: maximum over strongly connected
// components of their spectral radii.  Empty cycle structure gives [0,0].
inline RationalInterval spectral_radius(const FollowerGraph& g, const Rational& tol) {
    int n_comp = 0;
    std::vector<int> comp = detail::strongly_connected_components(g, &n_comp);
    int n = static_cast<int>(g.succ.size());
    RationalInterval best{Rational(0)};
    bool any = false;
    for (int c = 0; c < n_comp; ++c) {
        std::vector<int> members;
        for (int v = 0; v < n; ++v)
            if (comp[static_cast<size_t>(v)] == c) members.push_back(v);
        bool nontrivial = members.size() > 1;
        if (!nontrivial)
            for (auto [to, lab] : g.succ[static_cast<size_t>(members[0])])
                if (to == members[0]) nontrivial = true;
        if (!nontrivial) continue;
        std::map<int, int> local;
        for (size_t i = 0; i < members.size(); ++i) local[members[i]] = static_cast<int>(i);
        std::vector<std::vector<int>> adj(members.size());
        for (size_t i = 0; i < members.size(); ++i)
            for (auto [to, lab] : g.succ[static_cast<size_t>(members[i])])
                if (auto it = local.find(to); it != local.end())
                    adj[i].push_back(it->second);
        RationalInterval r = detail::scc_spectral_radius(adj, tol);
        best = any ? RationalInterval{std::max(best.lo, r.lo), std::max(best.hi, r.hi)} : r;
        any = true;
    }
    return best;
}

// Exact number of length-n words all of whose length-l windows are allowed.
// Below the window length there is no constraint; otherwise words biject
// with paths in the follower graph.
inline Integer count_blocks_matrix(const FollowerGraph& g, long n) {
    if (n < 1) throw Error("block length must be >= 1");
    if (n < g.l) return ipow(g.n_symbols, static_cast<unsigned long>(n));
    size_t nv = g.succ.size();
    std::vector<Integer> u(nv, Integer(1));
    long steps = n - g.l + 1;
    for (long s = 0; s < steps; ++s) {
        std::vector<Integer> w(nv, Integer(0));
        for (size_t v = 0; v < nv; ++v)
            for (auto [to, lab] : g.succ[v]) w[v] += u[static_cast<size_t>(to)];
        u = std::move(w);
    }
    Integer total(0);
    for (const Integer& x : u) total += x;
    return total;
}

// Exhaustive oracle for the same count.
inline Integer brute_count(const Word& bound_word, long n) {
    if (n < 1) throw Error("block length must be >= 1");
    int sym = bound_word.alphabet().M + 1;
    double bits = static_cast<double>(n) * std::log2(static_cast<double>(sym));
    if (bits > 25.0) throw TooLarge("brute-force enumeration over " + std::to_string(n) +
                                    " digits is out of budget");
    Word low = bound_word.complement();
    long l = bound_word.size();
    std::vector<int> w;
    long count = 0;
    auto window_ok = [&](long end) {  // window of length l ending at position end-1
        bool lo_strict = false, hi_strict = false;
        for (long i = 0; i < l; ++i) {
            int d = w[static_cast<size_t>(end - l + i)];
            if (!hi_strict) {
                if (d > bound_word[i]) return false;
                if (d < bound_word[i]) hi_strict = true;
            }
            if (!lo_strict) {
                if (d < low[i]) return false;
                if (d > low[i]) lo_strict = true;
            }
        }
        return lo_strict && hi_strict;
    };
    auto rec = [&](auto&& self) -> void {
        if (static_cast<long>(w.size()) == n) {
            ++count;
            return;
        }
        for (int d = 0; d < sym; ++d) {
            w.push_back(d);
            if (static_cast<long>(w.size()) < l || window_ok(static_cast<long>(w.size())))
                self(self);
            w.pop_back();
        }
    };
    rec(rec);
    return Integer(count);
}

// Plain-text adjacency list for external inspection: one line per vertex
// with its window word, then "label->target" pairs.
inline std::string adjacency_list(const FollowerGraph& g) {
    std::string out;
    for (size_t v = 0; v < g.vertex_words.size(); ++v) {
        std::string w;
        for (int d : g.vertex_words[v]) w += std::to_string(d);
        out += std::to_string(v) + " [" + w + "]";
        for (auto [to, lab] : g.succ[v])
            out += " " + std::to_string(lab) + "->" + std::to_string(to);
        out += "\n";
    }
    return out;
}

// Unique root in (1,2) of 1 + x + ... + x^{j-1} = x^j; the degenerate j = 1
// gives exactly 1.
inline RationalInterval phi_root(long j, const Rational& tol) {
    if (j < 1) throw Error("index must be >= 1");
    if (j == 1) return RationalInterval(Rational(1));
    auto p = [&](const Rational& x) -> Rational {
        Rational s(0), xp(1);
        for (long i = 0; i < j; ++i) {
            s += xp;
            xp *= x;
        }
        return Rational(xp - s);  // x^j - (1 + ... + x^{j-1})
    };
    Rational lo(1), hi(2);
    while (hi - lo > tol) {
        Rational mid = (lo + hi) / 2;
        Rational v = p(mid);
        if (v == 0) return RationalInterval(mid);
        (v < 0 ? lo : hi) = mid;
    }
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// Block-level subshift of a relative plateau: the same window construction,
// but over the four-letter block alphabet with automaton transitions.  This
// is the direct route to h of the relative set at a child plateau, without
// going through the induced base map.

inline std::vector<int> ref_word_to_block_codes(const Word& ref_word, const PhiAutomaton& aut) {
    std::vector<int> codes;
    int state = PhiAutomaton::Start;
    for (long i = 0; i < ref_word.size(); ++i) {
        auto e = aut.edge_for_bit(state, ref_word[i]);
        if (!e) throw InvalidReference("reference word leaves the automaton");
        codes.push_back(static_cast<int>(e->first));
        state = e->second;
    }
    return codes;
}

// Spectral radius of the block graph for the child generated by the given
// reference word inside the plateau of `aut`.  Divide its log by m for the
// entropy of the relative set there.
inline RationalInterval relative_block_sft_radius(const PhiAutomaton& aut, const Word& ref_word,
                                                  const Rational& tol) {
    std::vector<int> b = ref_word_to_block_codes(ref_word, aut);
    // bound word b+ at block level: increment the last block
    std::vector<int> high = b;
    int& last = high.back();
    if (last == static_cast<int>(LBlock::A))
        last = static_cast<int>(LBlock::APlus);
    else if (last == static_cast<int>(LBlock::BarAPlus))
        last = static_cast<int>(LBlock::BarA);
    else
        throw InvalidReference("reference word must end with bit 0");
    std::vector<int> low(high.size());
    for (size_t i = 0; i < high.size(); ++i) low[i] = 3 - high[i];
    // allowed block successions, read off the automaton
    auto step_ok = [](int prev, int next) {
        bool from_a = prev == static_cast<int>(LBlock::APlus) || prev == static_cast<int>(LBlock::BarA);
        if (from_a)
            return next == static_cast<int>(LBlock::BarA) ||
                   next == static_cast<int>(LBlock::BarAPlus);
        return next == static_cast<int>(LBlock::A) || next == static_cast<int>(LBlock::APlus);
    };
    FollowerGraph g = detail::build_window_graph(aut.word(), 4, low, high, step_ok);
    return spectral_radius(g, tol);
}

// ---------------------------------------------------------------------------
// Entropy of the univoque sets as a function of the base: a Devil's
// staircase, evaluated exactly on plateaus and bracketed between them.

struct EntropyValue {
    RationalInterval value;  // natural log
    enum class Basis { ExactZero, SftExact, Bracket, FullShift } basis;
    std::string certificate;
};

struct EntropyOptions {
    unsigned precision_bits = kDefaultPrecisionBits;
    int extend_cap_m = 10;     // enumeration horizon for bracket tightening
    int extend_cap_ref = 14;   // reference horizon
    Rational gamma_tol = Rational(1, 1000000000);  // 1e-9 on Perron roots
};

class EntropyEvaluator {
public:
    using Options = EntropyOptions;

    explicit EntropyEvaluator(const PlateauTree& tree, Options opts = {})
        : tree_(&tree), opts_(opts) {
        if (tree.alphabet().M == 1) opts_.extend_cap_m = std::max(opts_.extend_cap_m, 12);
    }

    const PlateauTree& tree() const { return *tree_; }
    const Options& options() const { return opts_; }

    // log of the Perron root of the subshift bounded by word+ (cached)
    RationalInterval plateau_log_gamma(const Word& generating_word) const {
        std::string key = std::to_string(generating_word.alphabet().M) + ":" +
                          generating_word.to_string();
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = gamma_cache_.find(key);
            if (it != gamma_cache_.end()) return it->second;
        }
        FollowerGraph g = build_sft(generating_word.incremented_last());
        RationalInterval gamma = spectral_radius(g, opts_.gamma_tol);
        RationalInterval lg = gamma.lo >= 1 ? log_enclosure(gamma, opts_.precision_bits)
                                            : RationalInterval(Rational(0));
        std::lock_guard<std::mutex> lock(mu_);
        gamma_cache_.emplace(key, lg);
        return lg;
    }

    // Entropy of the full univoque set at base q (the global staircase).
    EntropyValue entropy_H(const BaseEnclosure& q, const Rational& tol) const {
        return staircase(tree_->alphabet(), q, tol);
    }

    // Reference staircase over the alphabet {0,1}.
    EntropyValue reference_H(const BaseEnclosure& q_star, const Rational& tol) const {
        return staircase(Alphabet(1), q_star, tol);
    }

    // Entropy of the relative set of node J at q in (q_L, q_R]: exact value
    // h(reference plateau)/m inside pulled-back children, zero through the
    // complement-doubling point, an honest bracket in the gaps.
    EntropyValue entropy_HJ(const PlateauNode& J, const BaseEnclosure& q,
                            const Rational& tol) const {
        if (J.path.empty()) return entropy_H(q, tol);
        if (J.is_null || !J.generating_word)
            throw NotInPlateau("relative entropy needs a generated plateau");
        if (compare_bases(q, J.q_L) != Ordering::Greater ||
            compare_bases(q, J.q_R) == Ordering::Greater)
            throw NotInPlateau("base outside (q_L, q_R] of " + J.path_string());
        long m = J.generating_word->size();

        if (J.q_c && compare_bases(q, *J.q_c) != Ordering::Greater)
            return {RationalInterval(Rational(0)), EntropyValue::Basis::ExactZero,
                    "relative set empty or zero-entropy through q_c"};

        if (compare_bases(q, J.q_R) == Ordering::Equal) {
            RationalInterval v = log_enclosure(Rational(2), opts_.precision_bits) / Rational(m);
            return {v, EntropyValue::Basis::FullShift, "log 2 / m at the right endpoint"};
        }

        PhiAutomaton aut(*J.generating_word);
        for (;;) {
            std::vector<Word> ref = reference_words_snapshot();
            std::optional<Word> left_word;  // value computed only when needed
            std::optional<EntropyValue> bracket;
            auto left_lo = [&]() -> Rational {
                return left_word ? Rational(plateau_log_gamma(*left_word).lo / m) : Rational(0);
            };
            auto left_desc = [&]() {
                return left_word ? "child from ref " + left_word->to_string() : std::string("q_c");
            };
            for (const Word& r : ref) {
                auto [aL, aR] = child_alpha_bounds(aut, r);
                if (compare_to_seq(q, aL) == Ordering::Less) {
                    RationalInterval rv = plateau_log_gamma(r) / Rational(m);
                    bracket = {RationalInterval{left_lo(), rv.hi}, EntropyValue::Basis::Bracket,
                               "between " + left_desc() + " and child from ref " + r.to_string()};
                    break;
                }
                if (compare_to_seq(q, aR) != Ordering::Greater) {
                    RationalInterval v = plateau_log_gamma(r) / Rational(m);
                    return {v, EntropyValue::Basis::SftExact,
                            "child of " + J.path_string() + " pulled back from ref " +
                                r.to_string()};
                }
                left_word = r;
            }
            if (!bracket) {
                RationalInterval top =
                    log_enclosure(Rational(2), opts_.precision_bits) / Rational(m);
                bracket = {RationalInterval{left_lo(), top.hi}, EntropyValue::Basis::Bracket,
                           "between " + left_desc() + " and the right endpoint"};
            }
            if (bracket->value.width() <= tol) return *bracket;
            if (!extend_index(Alphabet(1))) return *bracket;
        }
    }

    // Extends both enumeration indexes to their caps; call once before
    // evaluating concurrently so later queries never mutate shared state.
    void warm_up() const {
        while (extend_index(tree_->alphabet())) {}
        while (extend_index(Alphabet(1))) {}
    }

    std::vector<Word> level1_words_snapshot() const {
        std::lock_guard<std::mutex> lock(index_mu_);
        return index_locked(tree_->alphabet()).words;
    }

    std::vector<Word> reference_words_snapshot() const {
        std::lock_guard<std::mutex> lock(index_mu_);
        return index_locked(Alphabet(1)).words;
    }

private:
    struct StaircaseIndex {
        Alphabet alphabet;
        BaseEnclosure qkl;
        int horizon = 0;
        std::vector<Word> words;
        std::vector<std::pair<BaseEnclosure, BaseEnclosure>> bounds;
    };

    EntropyValue staircase(Alphabet a, const BaseEnclosure& q, const Rational& tol) const {
        if (q.alphabet != a) throw AlphabetMismatch();
        int M = a.M;
        bool is_top = q.is_point() && q.interval.lo == M + 1;
        if (!is_top && q.defining_seq) {
            auto f = q.defining_seq->eventually_periodic_form();
            is_top = f && f->preamble.empty() && f->period == std::vector<int>{M};
        }
        if (is_top) {
            // every block occurs in the constraint set at the top base
            return {log_enclosure(Rational(M + 1), opts_.precision_bits),
                    EntropyValue::Basis::FullShift, "full shift at M+1"};
        }
        for (;;) {
            StaircaseIndex idx = index_snapshot(a);
            if (compare_bases(q, idx.qkl) != Ordering::Greater)
                return {RationalInterval(Rational(0)), EntropyValue::Basis::ExactZero,
                        "at or below the smallest univoque base"};
            std::optional<Word> left_word;  // value computed only when needed
            std::optional<EntropyValue> bracket;
            auto left_lo = [&]() {
                return left_word ? plateau_log_gamma(*left_word).lo : Rational(0);
            };
            auto left_desc = [&]() {
                return left_word ? left_word->to_string()
                                 : std::string("the smallest univoque base");
            };
            for (size_t i = 0; i < idx.words.size(); ++i) {
                const auto& [bL, bR] = idx.bounds[i];
                if (compare_bases(q, bL) == Ordering::Less) {
                    RationalInterval rv = plateau_log_gamma(idx.words[i]);
                    bracket = {RationalInterval{left_lo(), rv.hi}, EntropyValue::Basis::Bracket,
                               "between " + left_desc() + " and " + idx.words[i].to_string()};
                    break;
                }
                if (compare_bases(q, bR) != Ordering::Greater) {
                    RationalInterval v = plateau_log_gamma(idx.words[i]);
                    return {v, EntropyValue::Basis::SftExact,
                            "plateau " + idx.words[i].to_string()};
                }
                left_word = idx.words[i];
            }
            if (!bracket) {
                RationalInterval top = log_enclosure(Rational(M + 1), opts_.precision_bits);
                bracket = {RationalInterval{left_lo(), top.hi}, EntropyValue::Basis::Bracket,
                           "between " + left_desc() + " and M+1"};
            }
            if (bracket->value.width() <= tol) return *bracket;
            if (!extend_index(a)) return *bracket;
        }
    }

    StaircaseIndex index_snapshot(Alphabet a) const {
        std::lock_guard<std::mutex> lock(index_mu_);
        return index_locked(a);
    }

    StaircaseIndex& index_locked(Alphabet a) const {
        auto& slot = a.M == 1 ? ref_index_ : m_index_;
        if (!slot) {
            StaircaseIndex idx{a,
                               a.M == tree_->alphabet().M
                                   ? tree_->komornik_loreti_base()
                                   : komornik_loreti(a, opts_.precision_bits),
                               0,
                               {},
                               {}};
            idx.horizon = a.M == 1 ? tree_->options().max_ref_len : tree_->options().max_word_len;
            const std::vector<Word>& seed =
                a.M == 1 ? tree_->reference_words() : level1_tree_words();
            for (const Word& w : seed) {
                idx.words.push_back(w);
                idx.bounds.push_back(cached_basic_interval(w));
            }
            slot = std::move(idx);
        }
        return *slot;
    }

    std::vector<Word> level1_tree_words() const {
        std::vector<Word> out;
        for (const PlateauNode* c : tree_->children({}))
            if (!c->is_null && c->generating_word) out.push_back(*c->generating_word);
        return out;
    }

    std::pair<BaseEnclosure, BaseEnclosure> cached_basic_interval(const Word& w) const {
        std::string key = std::to_string(w.alphabet().M) + ":" + w.to_string();
        auto it = bound_cache_.find(key);
        if (it != bound_cache_.end()) return it->second;
        // positioning only needs moderate widths; exact order decisions go
        // through the defining sequences and sign polynomials anyway
        auto b = basic_interval(w, std::min(opts_.precision_bits, 64u));
        bound_cache_.emplace(key, b);
        return b;
    }

    bool extend_index(Alphabet a) const {
        std::lock_guard<std::mutex> lock(index_mu_);
        StaircaseIndex& idx = index_locked(a);
        int cap = a.M == 1 ? opts_.extend_cap_ref : opts_.extend_cap_m;
        if (idx.horizon >= cap) return false;
        idx.horizon = std::min(cap, idx.horizon + 2);
        idx.words = enumerate_level1_words(a, idx.horizon);
        idx.bounds.clear();
        for (const Word& w : idx.words) idx.bounds.push_back(cached_basic_interval(w));
        return true;
    }

    // alpha sequences of a pulled-back child's endpoints (cached)
    std::pair<DigitSeq, DigitSeq> child_alpha_bounds(const PhiAutomaton& aut,
                                                     const Word& ref) const {
        std::string key = aut.word().to_string() + "|" + ref.to_string();
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = child_seq_cache_.find(key);
            if (it != child_seq_cache_.end()) return it->second;
        }
        Word w = pullback_plateau(ref, aut);
        auto val = std::make_pair(alpha_of_left_endpoint(w), alpha_of_right_endpoint(w));
        std::lock_guard<std::mutex> lock(mu_);
        child_seq_cache_.emplace(key, val);
        return val;
    }

    Ordering compare_to_seq(const BaseEnclosure& q, const DigitSeq& alpha) const {
        if (q.defining_seq) return detail::seq_base_order(*q.defining_seq, alpha);
        std::string key = std::to_string(q.alphabet.M) + "#" + alpha.describe();
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = seq_base_cache_.find(key);
            if (it != seq_base_cache_.end()) return compare_bases(q, it->second);
        }
        BaseEnclosure b = base_from_alpha(alpha, opts_.precision_bits);
        std::lock_guard<std::mutex> lock(mu_);
        auto [it, ignore] = seq_base_cache_.emplace(key, std::move(b));
        return compare_bases(q, it->second);
    }

    const PlateauTree* tree_;
    Options opts_;
    mutable std::mutex mu_;
    mutable std::mutex index_mu_;
    mutable std::map<std::string, RationalInterval> gamma_cache_;
    mutable std::map<std::string, std::pair<DigitSeq, DigitSeq>> child_seq_cache_;
    mutable std::map<std::string, BaseEnclosure> seq_base_cache_;
    mutable std::map<std::string, std::pair<BaseEnclosure, BaseEnclosure>> bound_cache_;
    mutable std::optional<StaircaseIndex> m_index_;
    mutable std::optional<StaircaseIndex> ref_index_;
};

}  // namespace univoque
