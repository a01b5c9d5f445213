#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "tablerl/errors.hpp"
#include "tablerl/levenshtein.hpp"
#include "tablerl/table_model.hpp"
#include "tablerl/table_parsing.hpp"

namespace tablerl {

/// Edit costs for the tree distance. rename must be symmetric, zero on
/// identical nodes and bounded by 1 for the similarity normalization to stay
/// in [0, 1].
struct TedsCostModel {
    double insert_cost = 1.0;
    double delete_cost = 1.0;
    std::function<double(const TableNode&, const TableNode&)> rename;
};

/// Cost model used for scoring: label mismatch costs 1; Td-vs-Td pairs cost
/// the normalized Levenshtein distance of their texts, plus 1 when the spans
/// differ, capped at 1.
inline double default_rename_cost(const TableNode& a, const TableNode& b) {
    if (a.label != b.label) return 1.0;
    if (a.label != Tag::Td) return 0.0;
    double c = normalized_levenshtein(a.text, b.text);
    if (a.rowspan != b.rowspan || a.colspan != b.colspan) c += 1.0;
    return c > 1.0 ? 1.0 : c;
}

inline TedsCostModel default_teds_cost() {
    return TedsCostModel{1.0, 1.0, &default_rename_cost};
}

namespace detail {

/// Postorder flattening with the leftmost-leaf-descendant index and keyroots
/// needed by the Zhang-Shasha recurrence.
struct PostorderTree {
    std::vector<const TableNode*> nodes;
    std::vector<int> lml;
    std::vector<int> keyroots;
};

inline int flatten_postorder(const TableNode& node, PostorderTree& out) {
    int first_leaf = -1;
    for (const TableNode& c : node.children) {
        const int child_leaf = flatten_postorder(c, out);
        if (first_leaf < 0) first_leaf = child_leaf;
    }
    out.nodes.push_back(&node);
    const int idx = static_cast<int>(out.nodes.size()) - 1;
    if (first_leaf < 0) first_leaf = idx;
    out.lml.push_back(first_leaf);
    return first_leaf;
}

inline PostorderTree postorder(const TableNode& root) {
    PostorderTree t;
    flatten_postorder(root, t);
    // A node is a keyroot when no node after it shares its leftmost leaf:
    // the root plus every node with a left sibling.
    const int n = static_cast<int>(t.nodes.size());
    std::vector<int> last_with_lml(n, -1);
    for (int i = 0; i < n; ++i) last_with_lml[t.lml[i]] = i;
    for (int i = 0; i < n; ++i) {
        if (last_with_lml[t.lml[i]] == i) t.keyroots.push_back(i);
    }
    return t;
}

} // namespace detail

/// Exact minimum-cost edit distance between two ordered labeled trees under
/// insert/delete/rename, via the Zhang-Shasha dynamic program over keyroot
/// pairs.
inline double tree_edit_distance(const TableNode& a, const TableNode& b,
                                 const TedsCostModel& cost = default_teds_cost()) {
    using detail::PostorderTree;

    const PostorderTree ta = detail::postorder(a);
    const PostorderTree tb = detail::postorder(b);
    const int na = static_cast<int>(ta.nodes.size());
    const int nb = static_cast<int>(tb.nodes.size());

    std::vector<double> treedist(static_cast<std::size_t>(na) * nb, 0.0);
    auto td_at = [&](int i, int j) -> double& { return treedist[static_cast<std::size_t>(i) * nb + j]; };

    // Rename costs are reused across keyroot pairs; compute once.
    std::vector<double> rename(static_cast<std::size_t>(na) * nb);
    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
            rename[static_cast<std::size_t>(i) * nb + j] = cost.rename(*ta.nodes[i], *tb.nodes[j]);
        }
    }

    std::vector<double> fd; // forest distances, (span_a + 1) x (span_b + 1)
    for (const int ki : ta.keyroots) {
        const int li = ta.lml[ki];
        const int rows = ki - li + 2;
        for (const int kj : tb.keyroots) {
            const int lj = tb.lml[kj];
            const int cols = kj - lj + 2;

            fd.assign(static_cast<std::size_t>(rows) * cols, 0.0);
            auto fd_at = [&](int x, int y) -> double& { return fd[static_cast<std::size_t>(x) * cols + y]; };

            for (int x = 1; x < rows; ++x) fd_at(x, 0) = fd_at(x - 1, 0) + cost.delete_cost;
            for (int y = 1; y < cols; ++y) fd_at(0, y) = fd_at(0, y - 1) + cost.insert_cost;

            for (int x = 1; x < rows; ++x) {
                const int i = li + x - 1;
                for (int y = 1; y < cols; ++y) {
                    const int j = lj + y - 1;
                    const double del = fd_at(x - 1, y) + cost.delete_cost;
                    const double ins = fd_at(x, y - 1) + cost.insert_cost;
                    if (ta.lml[i] == li && tb.lml[j] == lj) {
                        const double ren = fd_at(x - 1, y - 1) + rename[static_cast<std::size_t>(i) * nb + j];
                        const double d = std::min({del, ins, ren});
                        fd_at(x, y) = d;
                        td_at(i, j) = d;
                    } else {
                        const double sub = fd_at(ta.lml[i] - li, tb.lml[j] - lj) + td_at(i, j);
                        fd_at(x, y) = std::min({del, ins, sub});
                    }
                }
            }
        }
    }
    return td_at(na - 1, nb - 1);
}

inline double tree_edit_distance(const TableTree& a, const TableTree& b,
                                 const TedsCostModel& cost = default_teds_cost()) {
    return tree_edit_distance(a.root, b.root, cost);
}

/// Tree-edit-distance similarity on a 0..1 scale; 1 is a perfect match.
struct TedsScore {
    double similarity = 0.0;
    double distance = 0.0;
    std::size_t max_size = 1;
};

/// similarity = 1 - distance / max(|pred|, |gold|), clamped to [0, 1].
inline TedsScore teds(const TableTree& pred, const TableTree& gold) {
    TedsScore s;
    s.distance = tree_edit_distance(pred, gold);
    s.max_size = std::max(tree_size(pred), tree_size(gold));
    s.similarity = 1.0 - s.distance / static_cast<double>(s.max_size);
    s.similarity = std::clamp(s.similarity, 0.0, 1.0);
    return s;
}

/// End-to-end scoring from raw strings. A prediction that fails to parse
/// scores 0; a gold string that fails to parse raises GoldUnparseable since
/// that is a corrupt dataset record, not a bad prediction.
inline TedsScore teds_from_strings(std::string_view pred_src, std::string_view gold_src,
                                   TableFormat fmt) {
    TableTree gold;
    try {
        gold = parse_table(gold_src, fmt);
    } catch (const Error& e) {
        throw GoldUnparseable(std::string("gold table failed to parse: ") + e.what());
    }
    TableTree pred;
    try {
        pred = parse_table(pred_src, fmt);
    } catch (const Error&) {
        TedsScore s;
        s.similarity = 0.0;
        s.max_size = tree_size(gold);
        s.distance = static_cast<double>(s.max_size);
        return s;
    }
    return teds(pred, gold);
}

} // namespace tablerl
