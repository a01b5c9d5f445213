#pragma once

// Deterministic generators shared by unit and acceptance tests: random
// realistic tables, cell perturbations with rename cost exactly 1, and the
// exhaustive enumeration of small ordered labeled trees.

#include <string>
#include <vector>

#include "tablerl/rng.hpp"
#include "tablerl/table_model.hpp"

namespace tablerl::testsupport {

/// Random word over a lowercase alphabet; already whitespace-normalized so
/// parse/serialize round trips are byte-exact.
inline std::string random_cell_text(Rng& rng) {
    static constexpr char kAlpha[] = "abcdefghkmnpqrstuvwxyz0123456789";
    const std::size_t words = rng.bounded(3); // 0..2 words, empty cells allowed
    std::string out;
    for (std::size_t w = 0; w < words; ++w) {
        if (w > 0) out.push_back(' ');
        const std::size_t len = 1 + rng.bounded(6);
        for (std::size_t i = 0; i < len; ++i) {
            out.push_back(kAlpha[rng.bounded(sizeof(kAlpha) - 1)]);
        }
    }
    return out;
}

struct TableGenOptions {
    std::size_t max_rows = 6;
    std::size_t max_cols = 5;
    bool allow_header = true;
    bool allow_spans = false;
};

/// Random rectangular table tree: optional thead with one header row, body
/// rows under tbody (or directly under the root when there is no header).
inline TableTree random_table(Rng& rng, const TableGenOptions& opt = {}) {
    const std::size_t rows = 1 + rng.bounded(opt.max_rows);
    const std::size_t cols = 1 + rng.bounded(opt.max_cols);
    const bool header = opt.allow_header && rows >= 2 && rng.bounded(2) == 0;

    auto make_row = [&]() {
        std::vector<TableNode> cells;
        for (std::size_t c = 0; c < cols; ++c) {
            TableNode td = cell(random_cell_text(rng));
            if (opt.allow_spans && rng.bounded(8) == 0) {
                td.rowspan = 1 + static_cast<int>(rng.bounded(3));
                td.colspan = 1 + static_cast<int>(rng.bounded(3));
            }
            cells.push_back(std::move(td));
        }
        return elem(Tag::Tr, std::move(cells));
    };

    std::vector<TableNode> top;
    if (header) {
        top.push_back(elem(Tag::Thead, {make_row()}));
        std::vector<TableNode> body;
        for (std::size_t r = 1; r < rows; ++r) body.push_back(make_row());
        top.push_back(elem(Tag::Tbody, std::move(body)));
    } else {
        for (std::size_t r = 0; r < rows; ++r) top.push_back(make_row());
    }
    return make_table(std::move(top));
}

inline void collect_cells(TableNode& node, std::vector<TableNode*>& out) {
    if (node.label == Tag::Td) out.push_back(&node);
    for (TableNode& c : node.children) collect_cells(c, out);
}

/// Replaces k distinct cell texts with strings from a disjoint alphabet, so
/// each perturbed pair has normalized Levenshtein exactly 1 and the whole
/// tree moves edit distance exactly k.
inline TableTree perturb_cells(const TableTree& tree, std::size_t k, Rng& rng) {
    TableTree out = tree;
    std::vector<TableNode*> cells;
    collect_cells(out.root, cells);
    rng.shuffle(cells);
    if (k > cells.size()) k = cells.size();
    for (std::size_t i = 0; i < k; ++i) {
        std::string replacement;
        const std::size_t len = 1 + rng.bounded(5);
        for (std::size_t j = 0; j < len; ++j) {
            replacement.push_back(static_cast<char>('A' + rng.bounded(6)));
        }
        cells[i]->text = std::move(replacement);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration of ordered labeled trees. Node variants: Table, Tr,
// Td("a"), Td("b"). All shapes are covered via every ordered composition of
// the child subtree sizes.
// ---------------------------------------------------------------------------

inline const std::vector<TableNode>& node_variants() {
    static const std::vector<TableNode> kVariants = {
        elem(Tag::Table),
        elem(Tag::Tr),
        cell("a"),
        cell("b"),
    };
    return kVariants;
}

/// Builds, bottom-up, all trees of each size 1..max_size and all forests
/// (ordered children lists) of each total size 0..max_size-1.
class TreeEnumerator {
public:
    explicit TreeEnumerator(std::size_t max_size) {
        forests_.resize(max_size);
        trees_.resize(max_size + 1);
        forests_[0].emplace_back();
        for (std::size_t s = 1; s <= max_size; ++s) {
            for (const TableNode& variant : node_variants()) {
                for (const std::vector<TableNode>& kids : forests_[s - 1]) {
                    TableNode n = variant;
                    n.children = kids;
                    trees_[s].push_back(std::move(n));
                }
            }
            if (s >= max_size) continue;
            // Forests of total size s: a first subtree of size f, then a
            // smaller forest holding the rest.
            for (std::size_t f = 1; f <= s; ++f) {
                for (const TableNode& head : trees_[f]) {
                    for (const std::vector<TableNode>& tail : forests_[s - f]) {
                        std::vector<TableNode> forest;
                        forest.reserve(1 + tail.size());
                        forest.push_back(head);
                        forest.insert(forest.end(), tail.begin(), tail.end());
                        forests_[s].push_back(std::move(forest));
                    }
                }
            }
        }
    }

    const std::vector<TableNode>& trees(std::size_t size) const { return trees_[size]; }

    /// Every tree with 1..max_size nodes, smaller sizes first.
    std::vector<const TableNode*> all_trees() const {
        std::vector<const TableNode*> all;
        for (const std::vector<TableNode>& sized : trees_) {
            for (const TableNode& t : sized) all.push_back(&t);
        }
        return all;
    }

private:
    std::vector<std::vector<std::vector<TableNode>>> forests_; // by total size
    std::vector<std::vector<TableNode>> trees_;                // by size
};

} // namespace tablerl::testsupport
