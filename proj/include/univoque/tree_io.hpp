#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "univoque/plateaux.hpp"

namespace univoque {

namespace detail {

inline int cache_decimal_digits(unsigned precision_bits) {
    return static_cast<int>(precision_bits * 0.302) + 2;
}

inline std::string enclosure_field(const BaseEnclosure& b, int digits) {
    return decimal_string(b.interval.lo, digits, -1) + " " +
           decimal_string(b.interval.hi, digits, +1);
}

}  // namespace detail

// One record per node: path, generating word, endpoint enclosures with the
// build precision, special points, null flag.  Deterministic ordering so
// cache files diff cleanly.
inline std::string format_tree_cache(const PlateauTree& tree) {
    const auto& o = tree.options();
    int digits = detail::cache_decimal_digits(o.precision_bits);
    std::ostringstream out;
    out << "univoque-tree 1 M=" << o.M << " max_word_len=" << o.max_word_len
        << " max_ref_len=" << o.max_ref_len << " levels=" << o.levels
        << " precision_bits=" << o.precision_bits << "\n";
    for (const PlateauNode* n : tree.all_nodes()) {
        out << "node path=" << n->path_string() << " null=" << (n->is_null ? 1 : 0)
            << " level=" << n->level;
        if (n->generating_word) out << " word=" << n->generating_word->to_string();
        if (n->ref_word) out << " ref=" << n->ref_word->to_string();
        out << " qL=" << detail::enclosure_field(n->q_L, digits)
            << " qR=" << detail::enclosure_field(n->q_R, digits);
        if (n->q_G) out << " qG=" << detail::enclosure_field(*n->q_G, digits);
        if (n->q_F) out << " qF=" << detail::enclosure_field(*n->q_F, digits);
        if (n->q_c) out << " qc=" << detail::enclosure_field(*n->q_c, digits);
        out << "\n";
    }
    return out.str();
}

// Atomic rewrite: write to a sibling temp file, then rename over the target.
inline void write_tree_cache(const PlateauTree& tree, const std::string& path) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot open cache file for writing: " + tmp);
        f << format_tree_cache(tree);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("cannot atomically replace cache file: " + path);
}

// Reads back the build options from a cache header; the tree itself is
// reconstructed deterministically from them.
inline std::optional<PlateauTree::Options> read_tree_cache_options(const std::string& path) {
    std::ifstream f(path);
    if (!f) return std::nullopt;
    std::string magic;
    int version = 0;
    f >> magic >> version;
    if (magic != "univoque-tree" || version != 1) return std::nullopt;
    PlateauTree::Options o;
    std::string tok;
    while (f >> tok && tok.rfind("node", 0) != 0) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        std::string key = tok.substr(0, eq);
        int val = std::atoi(tok.substr(eq + 1).c_str());
        if (key == "M") o.M = val;
        else if (key == "max_word_len") o.max_word_len = val;
        else if (key == "max_ref_len") o.max_ref_len = val;
        else if (key == "levels") o.levels = val;
        else if (key == "precision_bits") o.precision_bits = static_cast<unsigned>(val);
    }
    return o;
}

}  // namespace univoque
