#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tablerl/errors.hpp"

namespace tablerl {

/// Tag alphabet of the canonical table tree. <th> cells are normalized to Td
/// by the parsers; header position is carried structurally by Thead.
enum class Tag { Table, Thead, Tbody, Tr, Td };

inline const char* tag_name(Tag t) {
    switch (t) {
        case Tag::Table: return "table";
        case Tag::Thead: return "thead";
        case Tag::Tbody: return "tbody";
        case Tag::Tr: return "tr";
        case Tag::Td: return "td";
    }
    return "?";
}

/// One node of the table tree. Only Td nodes carry text; non-Td nodes keep
/// rowspan = colspan = 1. Child order is significant.
struct TableNode {
    Tag label = Tag::Td;
    std::string text;
    int rowspan = 1;
    int colspan = 1;
    std::vector<TableNode> children;

    bool operator==(const TableNode&) const = default;
};

/// Rooted ordered table tree; root is always a Table node.
struct TableTree {
    TableNode root;

    bool operator==(const TableTree&) const = default;
};

inline TableNode cell(std::string text, int rowspan = 1, int colspan = 1) {
    TableNode n;
    n.label = Tag::Td;
    n.text = std::move(text);
    n.rowspan = rowspan;
    n.colspan = colspan;
    return n;
}

inline TableNode elem(Tag label, std::vector<TableNode> children = {}) {
    TableNode n;
    n.label = label;
    n.children = std::move(children);
    return n;
}

inline TableTree make_table(std::vector<TableNode> children = {}) {
    TableTree t;
    t.root = elem(Tag::Table, std::move(children));
    return t;
}

/// Total node count, root included.
inline std::size_t tree_size(const TableNode& node) {
    std::size_t n = 1;
    for (const TableNode& c : node.children) n += tree_size(c);
    return n;
}

inline std::size_t tree_size(const TableTree& tree) { return tree_size(tree.root); }

inline bool is_well_formed(const TableNode& node) {
    if (node.rowspan < 1 || node.colspan < 1) return false;
    if (node.label != Tag::Td) {
        if (!node.text.empty()) return false;
        if (node.rowspan != 1 || node.colspan != 1) return false;
    }
    for (const TableNode& c : node.children) {
        if (!is_well_formed(c)) return false;
    }
    return true;
}

inline bool is_well_formed(const TableTree& tree) {
    return tree.root.label == Tag::Table && is_well_formed(tree.root);
}

/// Rectangular cell matrix with spans already expanded: a position covered by
/// a span holds a copy of the origin cell's text. Markdown has no span
/// concept, so this is the common ground between the two formats.
struct GridTable {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::vector<std::string>> cells;
    std::size_t header_rows = 0;

    bool operator==(const GridTable&) const = default;
};

/// Builds the canonical tree for a grid: one Tr per row, one Td per cell.
/// With header_rows > 0 the leading rows sit under a Thead and the remaining
/// rows (if any) under a Tbody; with 0 header rows the Tr nodes hang directly
/// off the root.
inline TableTree grid_to_tree(const GridTable& grid) {
    if (grid.n_rows == 0 || grid.n_cols == 0) {
        throw EmptyGrid("grid has no cells");
    }
    const std::size_t header = grid.header_rows < grid.n_rows ? grid.header_rows : grid.n_rows;

    auto make_row = [&](std::size_t r) {
        std::vector<TableNode> cells_in_row;
        cells_in_row.reserve(grid.n_cols);
        for (std::size_t c = 0; c < grid.n_cols; ++c) {
            cells_in_row.push_back(cell(grid.cells[r][c]));
        }
        return elem(Tag::Tr, std::move(cells_in_row));
    };

    std::vector<TableNode> top;
    if (header == 0) {
        for (std::size_t r = 0; r < grid.n_rows; ++r) top.push_back(make_row(r));
    } else {
        std::vector<TableNode> head_rows;
        for (std::size_t r = 0; r < header; ++r) head_rows.push_back(make_row(r));
        top.push_back(elem(Tag::Thead, std::move(head_rows)));
        if (header < grid.n_rows) {
            std::vector<TableNode> body_rows;
            for (std::size_t r = header; r < grid.n_rows; ++r) body_rows.push_back(make_row(r));
            top.push_back(elem(Tag::Tbody, std::move(body_rows)));
        }
    }
    return make_table(std::move(top));
}

} // namespace tablerl
