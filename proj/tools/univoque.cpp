// Command-line front end: expansions, plateau-tree building and caching,
// entropy/dimension queries, staircase grids, and brute-force oracles.

#include <CLI11.hpp>

#include <atomic>
#include <iostream>
#include <thread>

#include "univoque/tree_io.hpp"
#include "univoque/univoque.hpp"

using namespace univoque;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitPrecision = 3;
constexpr int kExitOracle = 4;

struct Config {
    int M = 1;
    unsigned precision_bits = kDefaultPrecisionBits;
    long depth = 1024;
    int max_word_len = 8;
    int max_ref_len = 8;
    int levels = 1;
    std::string tol = "1e-6";
    std::string cache_path;
    std::string format = "human";

    Alphabet alphabet() const { return Alphabet(M); }

    Rational tolerance() const {
        // accept "1e-6" and plain decimals
        auto e = tol.find('e');
        if (e == std::string::npos) return rational_from_decimal(tol);
        Rational mant = rational_from_decimal(tol.substr(0, e));
        int ex = std::atoi(tol.c_str() + e + 1);
        Rational p(1);
        for (int i = 0; i < std::abs(ex); ++i) p *= 10;
        return ex >= 0 ? Rational(mant * p) : Rational(mant / p);
    }

    PlateauTree::Options tree_options() const {
        PlateauTree::Options o;
        o.M = M;
        o.max_word_len = max_word_len;
        o.max_ref_len = max_ref_len;
        o.levels = levels;
        o.precision_bits = precision_bits;
        return o;
    }
};

DigitSeq parse_seqspec(const std::string& spec, Alphabet a) {
    if (spec == "lambda") return DigitSeq::thue_morse_lambda(a);
    if (spec.rfind("dvk(", 0) == 0 && spec.back() == ')')
        return DigitSeq::dvk_doubling(Word::parse(a, spec.substr(4, spec.size() - 5)));
    if (spec.rfind("per(", 0) == 0 && spec.back() == ')')
        return DigitSeq::periodic(Word::parse(a, spec.substr(4, spec.size() - 5)));
    if (spec.rfind("pre(", 0) == 0) {
        auto close = spec.find(')');
        if (close == std::string::npos || spec.compare(close + 1, 4, "per(") != 0 ||
            spec.back() != ')')
            throw ParseError("bad sequence spec: " + spec);
        Word pre = Word::parse(a, spec.substr(4, close - 4));
        Word per = Word::parse(a, spec.substr(close + 5, spec.size() - close - 6));
        return DigitSeq::eventually_periodic(pre, per);
    }
    throw ParseError("bad sequence spec: " + spec);
}

std::vector<int> parse_path(const std::string& s) {
    std::vector<int> path;
    if (s == "root" || s.empty()) return path;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t dot = s.find('.', pos);
        std::string tok = s.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        path.push_back(std::atoi(tok.c_str()));
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    return path;
}

const PlateauNode& node_at(const PlateauTree& tree, const std::string& path_str) {
    const PlateauNode* n = tree.find(parse_path(path_str));
    if (!n)
        throw NotCovered("no node at path " + path_str +
                         "; deepen the tree with --levels/--max-word-len");
    return *n;
}

// decimal literal, named constant, node point ("qR:2.1"), or an
// "alpha:<seq-spec>" defining sequence
BaseEnclosure parse_qspec(const std::string& spec, const Config& cfg, const PlateauTree* tree) {
    Alphabet a = cfg.alphabet();
    if (spec == "golden")
        return base_from_alpha(DigitSeq::periodic(Word(a, {1, 0})), cfg.precision_bits);
    if (spec == "kl") return komornik_loreti(a, cfg.precision_bits);
    if (spec.rfind("alpha:", 0) == 0)
        return base_from_alpha(parse_seqspec(spec.substr(6), a), cfg.precision_bits);
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        std::string which = spec.substr(0, colon);
        if (!tree) throw ParseError("node reference needs a tree: " + spec);
        const PlateauNode& n = node_at(*tree, spec.substr(colon + 1));
        if (which == "qL") return n.q_L;
        if (which == "qR") return n.q_R;
        if (which == "qG" && n.q_G) return *n.q_G;
        if (which == "qF" && n.q_F) return *n.q_F;
        if (which == "qc" && n.q_c) return *n.q_c;
        throw ParseError("bad node point: " + spec);
    }
    return BaseEnclosure::from_rational(a, rational_from_decimal(spec));
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s)
        if (c == '"' || c == '\\')
            out += std::string("\\") + c;
        else
            out += c;
    return out;
}

// ---------------------------------------------------------------------------

int cmd_alpha(const Config& cfg, const std::string& qspec, long n) {
    std::optional<PlateauTree> tree;
    if (qspec.find(':') != std::string::npos && qspec.rfind("alpha:", 0) != 0)
        tree = PlateauTree::build(cfg.tree_options());
    BaseEnclosure q = parse_qspec(qspec, cfg, tree ? &*tree : nullptr);
    Word digits = quasi_greedy_alpha(q, n);
    if (cfg.format == "csv") {
        std::cout << "q,digits,precision_bits\n"
                  << qspec << "," << digits.to_string() << "," << q.precision_bits << "\n";
    } else if (cfg.format == "jsonl") {
        std::cout << "{\"q\":\"" << json_escape(qspec) << "\",\"digits\":\""
                  << digits.to_string() << "\",\"precision_bits\":" << q.precision_bits << "}\n";
    } else {
        std::cout << digits.to_string() << "\n";
        std::cout << "# q = " << q.to_string() << ", certified at " << q.precision_bits
                  << " bits\n";
    }
    return kExitOk;
}

int cmd_tree(const Config& cfg, const std::string& window_lo, const std::string& window_hi) {
    PlateauTree tree = PlateauTree::build(cfg.tree_options());
    std::optional<RationalInterval> window;
    if (!window_lo.empty() && !window_hi.empty())
        window = RationalInterval(rational_from_decimal(window_lo),
                                  rational_from_decimal(window_hi));
    if (!cfg.cache_path.empty()) write_tree_cache(tree, cfg.cache_path);
    for (const PlateauNode* n : tree.all_nodes()) {
        if (window && !n->path.empty()) {
            bool outside = n->q_R.interval.certainly_less(RationalInterval(window->lo)) ||
                           n->q_L.interval.certainly_greater(RationalInterval(window->hi));
            if (outside) continue;
        }
        std::cout << n->path_string() << (n->is_null ? " null" : "");
        if (n->generating_word) std::cout << " word=" << n->generating_word->to_string();
        std::cout << " [" << n->q_L.to_string() << ", " << n->q_R.to_string() << "]";
        if (n->q_c) std::cout << " qc=" << n->q_c->to_string();
        std::cout << "\n";
    }
    return kExitOk;
}

int cmd_dim(const Config& cfg, const std::string& qspec, const std::string& side_str,
            const std::string& i_lo, const std::string& i_hi) {
    PlateauTree tree = PlateauTree::build(cfg.tree_options());
    EntropyEvaluator entropy(tree);
    DimensionContext ctx(tree, entropy);
    Rational tol = cfg.tolerance();
    DimValue d;
    std::string what;
    if (!i_lo.empty()) {
        BaseEnclosure t1 = parse_qspec(i_lo, cfg, &tree);
        BaseEnclosure t2 = parse_qspec(i_hi, cfg, &tree);
        d = interval_dim(ctx, t1, t2, tol);
        what = "dim [" + i_lo + ", " + i_hi + "]";
    } else {
        BaseEnclosure q = parse_qspec(qspec, cfg, &tree);
        Side side = side_str == "left" ? Side::Left
                    : side_str == "right" ? Side::Right
                                          : Side::TwoSided;
        d = local_dim(ctx, q, side, tol);
        what = "f" + std::string(side == Side::Left ? "-" : side == Side::Right ? "+" : "") +
               "(" + qspec + ")";
    }
    if (cfg.format == "csv") {
        std::cout << "what,lo,hi,basis\n"
                  << what << "," << decimal_string(d.value.lo, 15, -1) << ","
                  << decimal_string(d.value.hi, 15, +1) << "," << static_cast<int>(d.basis)
                  << "\n";
    } else if (cfg.format == "jsonl") {
        std::cout << "{\"what\":\"" << json_escape(what) << "\",\"lo\":"
                  << decimal_string(d.value.lo, 15, -1)
                  << ",\"hi\":" << decimal_string(d.value.hi, 15, +1) << ",\"witness\":\""
                  << json_escape(d.witness) << "\"}\n";
    } else {
        std::cout << what << " = " << d.to_string() << "\n";
    }
    return kExitOk;
}

int cmd_staircase(const Config& cfg, const std::string& t1s, const std::string& t2s, long grid_n,
                  const std::string& which) {
    if (grid_n < 2) throw ParseError("grid size must be >= 2");
    PlateauTree tree = PlateauTree::build(cfg.tree_options());
    EntropyEvaluator entropy(tree);
    entropy.warm_up();  // immutable shared state from here on
    DimensionContext ctx(tree, entropy);
    Rational tol = cfg.tolerance();

    BaseEnclosure t1 = parse_qspec(t1s, cfg, &tree);
    BaseEnclosure t2 = parse_qspec(t2s, cfg, &tree);
    Rational lo = t1.interval.lo, hi = t2.interval.hi;
    if (lo >= hi) throw ParseError("need t1 < t2");

    std::string mode = which;
    const PlateauNode* J = nullptr;
    auto colon = which.find(':');
    if (colon != std::string::npos) {
        mode = which.substr(0, colon);
        J = &node_at(tree, which.substr(colon + 1));
    }
    if ((mode == "HJ" || mode == "DJ") && !J) throw ParseError("HJ/DJ need a node path");

    std::vector<Rational> grid(static_cast<size_t>(grid_n));
    for (long i = 0; i < grid_n; ++i)
        grid[static_cast<size_t>(i)] = lo + (hi - lo) * Rational(i) / Rational(grid_n - 1);

    std::vector<std::pair<Rational, Rational>> vals(grid.size());
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= grid.size() || failed.load()) return;
            try {
                Rational qv = grid[i];
                if (qv <= 1) qv = Rational(1) + Rational(1, 1000000);
                BaseEnclosure q = BaseEnclosure::from_rational(Alphabet(cfg.M),
                                                               std::min(qv, Rational(cfg.M + 1)));
                RationalInterval v{Rational(0)};
                if (mode == "H") {
                    v = entropy.entropy_H(q, tol).value;
                } else if (mode == "HJ") {
                    v = entropy.entropy_HJ(*J, q, tol).value;
                } else if (mode == "f") {
                    v = local_dim(ctx, q, Side::TwoSided, tol).value;
                } else if (mode == "DJ") {
                    v = dj_function(ctx, *J, q, tol).value;
                } else {
                    throw ParseError("unknown staircase kind: " + mode);
                }
                vals[i] = {v.lo, v.hi};
            } catch (const NotInPlateau&) {
                vals[i] = {Rational(-1), Rational(-1)};  // outside the node's interval
            } catch (...) {
                failed.store(true);
                throw;
            }
        }
    };
    unsigned n_threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::cout << "q,value_lo,value_hi\n";
    for (size_t i = 0; i < grid.size(); ++i) {
        if (vals[i].first < 0) continue;  // skipped points outside the plateau
        std::cout << decimal_string(grid[i], 15) << "," << decimal_string(vals[i].first, 15, -1)
                  << "," << decimal_string(vals[i].second, 15, +1) << "\n";
    }
    return kExitOk;
}

// --- oracle suites ----------------------------------------------------------

int oracle_counts(const Config& cfg) {
    int failures = 0;
    auto run_alphabet = [&](int M, int maxlen, long nmax) {
        Alphabet a(M);
        std::vector<int> digits;
        auto rec = [&](auto&& self, int len) -> void {
            if (!digits.empty()) {
                Word w(a, digits);
                Word c = w.complement();
                if (c < w) {
                    try {
                        FollowerGraph g = build_sft(w);
                        for (long n = 1; n <= nmax; ++n) {
                            Integer mtx = count_blocks_matrix(g, n);
                            Integer bf = brute_count(w, n);
                            if (mtx != bf) {
                                ++failures;
                                std::cout << "MISMATCH bound=" << w.to_string() << " n=" << n
                                          << " matrix=" << mtx.get_str()
                                          << " brute=" << bf.get_str() << "\n";
                            }
                        }
                    } catch (const EmptySubshift&) {
                        for (long n = w.size(); n <= nmax; ++n)
                            if (brute_count(w, n) != 0) {
                                ++failures;
                                std::cout << "MISMATCH bound=" << w.to_string()
                                          << " empty subshift but brute > 0 at n=" << n << "\n";
                            }
                    }
                }
            }
            if (len == maxlen) return;
            for (int d = 0; d <= a.M; ++d) {
                digits.push_back(d);
                self(self, len + 1);
                digits.pop_back();
            }
        };
        rec(rec, 0);
    };
    run_alphabet(1, 6, 10);
    if (cfg.M >= 2) run_alphabet(2, 4, 8);
    std::cout << (failures ? "FAIL" : "PASS") << " counts: matrix vs exhaustive enumeration"
              << "\n";
    return failures ? kExitOracle : kExitOk;
}

// All admissible words up to max_len whose basic interval sits inside
// [q_c(J), q_R(J)], filtered to maximal ones.  Pruned word search; the exact
// lexicographic checks at the leaves are authoritative.
std::vector<Word> direct_children_search(const Word& a, int max_len) {
    Alphabet alpha = a.alphabet();
    DigitSeq theta = DigitSeq::dvk_doubling(a);
    DigitSeq alpha_r = alpha_of_right_endpoint(a);
    std::vector<Word> found;
    std::vector<int> w;
    auto prefix_possible = [&]() {
        long j = static_cast<long>(w.size());
        // admissibility on the known overlap
        for (long i = 1; i < j; ++i) {
            bool tail_gt = false, tail_decided = false;
            bool comp_gt_tail = false, comp_decided = false;
            for (long t = 0; i + t < j; ++t) {
                int head = w[static_cast<size_t>(t)], tail = w[static_cast<size_t>(i + t)];
                if (!tail_decided && tail != head) {
                    tail_gt = tail > head;
                    tail_decided = true;
                }
                int comp = alpha.M - head;
                if (!comp_decided && comp != tail) {
                    comp_gt_tail = comp > tail;
                    comp_decided = true;
                }
                if (tail_decided && comp_decided) break;
            }
            if (tail_decided && tail_gt) return false;
            if (comp_decided && comp_gt_tail) return false;
        }
        // within [theta, alpha(q_R)) as prefixes
        for (long i = 0; i < j; ++i) {
            int t = theta.digit_at(i + 1);
            if (w[static_cast<size_t>(i)] != t) {
                if (w[static_cast<size_t>(i)] < t) return false;
                break;
            }
        }
        for (long i = 0; i < j; ++i) {
            int r = alpha_r.digit_at(i + 1);
            if (w[static_cast<size_t>(i)] != r) {
                if (w[static_cast<size_t>(i)] > r) return false;
                break;
            }
        }
        return true;
    };
    auto rec = [&](auto&& self) -> void {
        if (!prefix_possible()) return;
        if (!w.empty()) {
            Word cand(alpha, w);
            if (is_admissible(cand)) {
                bool ql_ok =
                    lex_compare(DigitSeq::periodic(cand), theta).kind != LexResult::Less;
                bool qr_ok = lex_compare(alpha_of_right_endpoint(cand), alpha_r).kind !=
                             LexResult::Greater;
                if (ql_ok && qr_ok) found.push_back(cand);
            }
        }
        if (static_cast<int>(w.size()) == max_len) return;
        for (int d = 0; d <= alpha.M; ++d) {
            w.push_back(d);
            self(self);
            w.pop_back();
        }
    };
    rec(rec);
    // keep only maximal intervals
    std::vector<Word> keep;
    for (size_t i = 0; i < found.size(); ++i) {
        bool drop = false;
        for (size_t j = 0; j < found.size() && !drop; ++j) {
            if (i == j) continue;
            Ordering l = univoque::detail::seq_base_order(alpha_of_left_endpoint(found[j]),
                                                          alpha_of_left_endpoint(found[i]));
            Ordering r = univoque::detail::seq_base_order(alpha_of_right_endpoint(found[i]),
                                                          alpha_of_right_endpoint(found[j]));
            bool contains = l != Ordering::Greater && r != Ordering::Greater;
            if (!contains) continue;
            bool equal = l == Ordering::Equal && r == Ordering::Equal;
            if (!equal || found[j].size() < found[i].size()) drop = true;
        }
        if (!drop) keep.push_back(found[i]);
    }
    std::sort(keep.begin(), keep.end(), [](const Word& x, const Word& y) {
        if (x == y) return false;
        return univoque::detail::seq_base_order(alpha_of_left_endpoint(x),
                                                alpha_of_left_endpoint(y)) == Ordering::Less;
    });
    return keep;
}

int oracle_plateaus(const Config& cfg) {
    // pullback children versus a direct admissible-word search, for the
    // first generated plateau over the requested alphabet
    Alphabet a(cfg.M);
    std::vector<Word> level1 = enumerate_level1_words(a, std::min(cfg.max_word_len, 6));
    if (level1.empty()) {
        std::cout << "FAIL plateaus: no level-1 plateau at this word length\n";
        return kExitOracle;
    }
    int failures = 0;
    // shortest generating word keeps the direct search shallow
    const Word* shortest = &level1.front();
    for (const Word& w : level1)
        if (w.size() < shortest->size()) shortest = &w;
    const Word& gen = *shortest;
    long m = gen.size();
    int max_len = static_cast<int>(2 * 3 * m);
    PhiAutomaton aut(gen);
    std::vector<Word> ref = enumerate_level1_words(Alphabet(1), static_cast<int>(max_len / m));
    std::vector<Word> pulled;
    for (const Word& r : ref)
        if (r.size() * m <= max_len) pulled.push_back(pullback_plateau(r, aut));
    std::sort(pulled.begin(), pulled.end(), [](const Word& x, const Word& y) {
        if (x == y) return false;
        return univoque::detail::seq_base_order(alpha_of_left_endpoint(x),
                                                alpha_of_left_endpoint(y)) == Ordering::Less;
    });
    std::vector<Word> direct = direct_children_search(gen, max_len);
    if (pulled.size() != direct.size()) {
        ++failures;
        std::cout << "MISMATCH plateaus: " << pulled.size() << " pullback children vs "
                  << direct.size() << " from direct search (J = " << gen.to_string() << ")\n";
        for (const Word& w : direct) std::cout << "  direct: " << w.to_string() << "\n";
        for (const Word& w : pulled) std::cout << "  pulled: " << w.to_string() << "\n";
    } else {
        for (size_t i = 0; i < pulled.size(); ++i)
            if (!(pulled[i] == direct[i])) {
                ++failures;
                std::cout << "MISMATCH plateaus at index " << i << ": " << pulled[i].to_string()
                          << " vs " << direct[i].to_string() << "\n";
            }
    }
    std::cout << (failures ? "FAIL" : "PASS")
              << " plateaus: pullback children vs direct search (J = " << gen.to_string()
              << ", length <= " << max_len << ")\n";
    return failures ? kExitOracle : kExitOk;
}

int oracle_constants(const Config& cfg) {
    int failures = 0;
    auto check = [&](const char* name, const BaseEnclosure& b, const char* expect5) {
        Rational want = rational_from_decimal(expect5);
        Rational eps(1, 100000);
        bool ok = b.interval.lo >= want - eps && b.interval.hi <= want + eps;
        if (!ok) ++failures;
        std::cout << (ok ? "PASS" : "FAIL") << " constant " << name << " = " << b.to_string()
                  << " (expect " << expect5 << " to 5 decimals)\n";
    };
    Alphabet one(1);
    check("golden", base_from_alpha(DigitSeq::periodic(Word(one, {1, 0})), cfg.precision_bits),
          "1.61803");
    check("qF-ref",
          base_from_alpha(DigitSeq::periodic(Word(one, {1, 1, 0, 0})), cfg.precision_bits),
          "1.75488");
    check("q_KL(1)", komornik_loreti(one, cfg.precision_bits), "1.78723");
    return failures ? kExitOracle : kExitOk;
}

int cmd_oracle(const Config& cfg, const std::string& suite) {
    int rc = kExitOk;
    if (suite == "counts" || suite == "all") rc = std::max(rc, oracle_counts(cfg));
    if (suite == "plateaus" || suite == "all") rc = std::max(rc, oracle_plateaus(cfg));
    if (suite == "constants" || suite == "all") rc = std::max(rc, oracle_constants(cfg));
    if (rc == kExitOk) std::cout << "all oracle checks passed\n";
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unique expansions in non-integer bases: plateau tree, entropy, dimensions"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand name

    Config cfg;
    if (const char* env = std::getenv("UNIVOQUE_PRECISION_BITS"))
        cfg.precision_bits = static_cast<unsigned>(std::atoi(env));
    app.add_option("--M", cfg.M, "alphabet bound M (digits 0..M)")->capture_default_str();
    app.add_option("--precision-bits", cfg.precision_bits, "enclosure precision")
        ->capture_default_str();
    app.add_option("--depth", cfg.depth, "comparison/classification depth")
        ->capture_default_str();
    app.add_option("--max-word-len", cfg.max_word_len, "level-1 enumeration horizon")
        ->capture_default_str();
    app.add_option("--max-ref-len", cfg.max_ref_len, "reference enumeration horizon")
        ->capture_default_str();
    app.add_option("--levels", cfg.levels, "tree depth")->capture_default_str();
    app.add_option("--tol", cfg.tol, "tolerance for bracketed values")->capture_default_str();
    app.add_option("--cache", cfg.cache_path, "tree cache file path");
    app.add_option("--format", cfg.format, "output format: human, csv, jsonl")
        ->capture_default_str();

    std::string qspec, side = "two", i_lo, i_hi, window_lo, window_hi, which = "H", suite = "all";
    long n = 16, grid_n = 100;

    CLI::App* alpha = app.add_subcommand("alpha", "quasi-greedy expansion digits of 1");
    alpha->add_option("--q", qspec, "base spec")->required();
    alpha->add_option("--n", n, "number of digits")->capture_default_str();

    CLI::App* tree = app.add_subcommand("tree", "build the plateau tree and print/cache it");
    tree->add_option("--window-lo", window_lo, "restrict listing to bases >= this");
    tree->add_option("--window-hi", window_hi, "restrict listing to bases <= this");

    CLI::App* dim = app.add_subcommand("dim", "local or interval dimension");
    dim->add_option("--q", qspec, "base spec");
    dim->add_option("--side", side, "left, right, or two")->capture_default_str();
    dim->add_option("--interval-lo", i_lo, "interval left end");
    dim->add_option("--interval-hi", i_hi, "interval right end");

    CLI::App* stair = app.add_subcommand("staircase", "CSV grid of a staircase function");
    std::string t1s, t2s;
    stair->add_option("--t1", t1s, "grid start")->required();
    stair->add_option("--t2", t2s, "grid end")->required();
    stair->add_option("--grid-n", grid_n, "number of grid points")->capture_default_str();
    stair->add_option("--which", which, "H, HJ:<path>, f, or DJ:<path>")->capture_default_str();

    CLI::App* oracle = app.add_subcommand("oracle", "brute-force cross-checks");
    oracle->add_option("--suite", suite, "counts, plateaus, constants, or all")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitParse;
    }

    try {
        if (cfg.M < 1 || cfg.precision_bits < 8 || cfg.depth < 1 || cfg.max_word_len < 1 ||
            cfg.max_ref_len < 1 || cfg.levels < 0)
            throw ParseError("configuration values must be positive");
        if (cfg.tolerance() < pow2(-static_cast<long>(cfg.precision_bits)))
            throw ParseError("tolerance is finer than the enclosure precision; raise "
                             "--precision-bits or loosen --tol");
        if (alpha->parsed()) return cmd_alpha(cfg, qspec, n);
        if (tree->parsed()) return cmd_tree(cfg, window_lo, window_hi);
        if (dim->parsed()) return cmd_dim(cfg, qspec, side, i_lo, i_hi);
        if (stair->parsed()) return cmd_staircase(cfg, t1s, t2s, grid_n, which);
        if (oracle->parsed()) return cmd_oracle(cfg, suite);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const PrecisionExhausted& e) {
        std::cerr << "precision exhausted: " << e.what()
                  << "\nretry with a larger --precision-bits\n";
        return kExitPrecision;
    } catch (const UndecidableAtPrecision& e) {
        std::cerr << "undecidable at configured precision: " << e.what() << "\n";
        return kExitPrecision;
    } catch (const NotCovered& e) {
        std::cerr << "not covered: " << e.what() << "\n";
        return kExitPrecision;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
