#pragma once

#include <cctype>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tablerl/errors.hpp"
#include "tablerl/table_model.hpp"
#include "tablerl/text.hpp"

namespace tablerl {

enum class TableFormat { Html, Markdown };

inline const char* format_name(TableFormat f) {
    return f == TableFormat::Html ? "html" : "markdown";
}

namespace detail {

// ---------------------------------------------------------------------------
// HTML scanning
//
// A forgiving tokenizer scoped to table markup, not an HTML5 parser. Policy
// outputs are frequently malformed; anything unrecognized is hoisted so the
// reward path degrades to a low score instead of failing.
// ---------------------------------------------------------------------------

struct HtmlTag {
    bool closing = false;
    bool self_closing = false;
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
};

inline bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
inline bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

/// True when src[pos] == '<' starts something tag-like rather than stray text.
inline bool looks_like_markup(std::string_view src, std::size_t pos) {
    if (pos + 1 >= src.size()) return false;
    const char c = src[pos + 1];
    return is_alpha(c) || c == '/' || c == '!' || c == '?';
}

/// Consumes the construct starting at src[pos] == '<'. Comments, doctypes and
/// processing instructions are skipped and yield no tag. pos always advances.
inline std::optional<HtmlTag> read_tag(std::string_view src, std::size_t& pos) {
    const std::size_t n = src.size();
    if (src.compare(pos, 4, "<!--") == 0) {
        const std::size_t end = src.find("-->", pos + 4);
        pos = end == std::string_view::npos ? n : end + 3;
        return std::nullopt;
    }
    if (src[pos + 1] == '!' || src[pos + 1] == '?') {
        const std::size_t end = src.find('>', pos + 1);
        pos = end == std::string_view::npos ? n : end + 1;
        return std::nullopt;
    }

    HtmlTag tag;
    std::size_t i = pos + 1;
    if (src[i] == '/') {
        tag.closing = true;
        ++i;
    }
    if (i >= n || !is_alpha(src[i])) {
        // "</>" and friends: swallow up to the next '>'.
        const std::size_t end = src.find('>', i);
        pos = end == std::string_view::npos ? n : end + 1;
        return std::nullopt;
    }
    while (i < n && is_alnum(src[i])) {
        tag.name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(src[i]))));
        ++i;
    }

    // Attributes.
    while (i < n && src[i] != '>') {
        if (is_space(src[i])) {
            ++i;
            continue;
        }
        if (src[i] == '/') {
            ++i;
            if (i < n && src[i] == '>') tag.self_closing = true;
            continue;
        }
        std::string key;
        while (i < n && !is_space(src[i]) && src[i] != '=' && src[i] != '>' && src[i] != '/') {
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(src[i]))));
            ++i;
        }
        while (i < n && is_space(src[i])) ++i;
        std::string value;
        if (i < n && src[i] == '=') {
            ++i;
            while (i < n && is_space(src[i])) ++i;
            if (i < n && (src[i] == '"' || src[i] == '\'')) {
                const char quote = src[i++];
                while (i < n && src[i] != quote) value.push_back(src[i++]);
                if (i < n) ++i;
            } else {
                while (i < n && !is_space(src[i]) && src[i] != '>') value.push_back(src[i++]);
            }
        }
        if (!key.empty()) tag.attrs.emplace_back(std::move(key), std::move(value));
    }
    pos = i < n ? i + 1 : n;
    return tag;
}

/// Decodes the five XML-standard entities; everything else stays literal.
inline std::string decode_entities(std::string_view s) {
    static constexpr std::pair<std::string_view, char> kEntities[] = {
        {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''},
    };
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '&') {
            bool matched = false;
            for (const auto& [name, ch] : kEntities) {
                if (s.compare(i, name.size(), name) == 0) {
                    out.push_back(ch);
                    i += name.size();
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
        }
        out.push_back(s[i++]);
    }
    return out;
}

inline int parse_span_attr(const std::string& value) {
    const char* p = value.c_str();
    char* end = nullptr;
    const long v = std::strtol(p, &end, 10);
    if (end == p || v < 1) return 1;
    return v > 65535 ? 65535 : static_cast<int>(v);
}

struct BuildNode {
    Tag label = Tag::Td;
    std::string raw_text;
    int rowspan = 1;
    int colspan = 1;
    std::vector<std::size_t> kids;
};

inline TableNode materialize(const std::vector<BuildNode>& arena, std::size_t idx) {
    const BuildNode& b = arena[idx];
    TableNode n;
    n.label = b.label;
    n.rowspan = b.rowspan;
    n.colspan = b.colspan;
    if (b.label == Tag::Td) n.text = normalize_whitespace(decode_entities(b.raw_text));
    n.children.reserve(b.kids.size());
    for (std::size_t k : b.kids) n.children.push_back(materialize(arena, k));
    return n;
}

// ---------------------------------------------------------------------------
// Markdown cell splitting
// ---------------------------------------------------------------------------

/// Splits a pipe row into trimmed cells. One leading and one trailing pipe are
/// optional; "\|" escapes a literal pipe.
inline std::vector<std::string> split_md_row(std::string_view line) {
    std::string_view s = trim(line);
    if (!s.empty() && s.front() == '|') s.remove_prefix(1);
    if (!s.empty() && s.back() == '|' && (s.size() < 2 || s[s.size() - 2] != '\\')) {
        s.remove_suffix(1);
    }
    std::vector<std::string> cells;
    std::string current;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] == '|') {
            current.push_back('|');
            ++i;
        } else if (s[i] == '|') {
            cells.emplace_back(trim(current));
            current.clear();
        } else {
            current.push_back(s[i]);
        }
    }
    cells.emplace_back(trim(current));
    return cells;
}

/// Delimiter row: every cell is dashes with optional alignment colons.
inline bool is_md_delimiter_row(std::string_view line) {
    if (line.find('-') == std::string_view::npos) return false;
    for (const std::string& c : split_md_row(line)) {
        std::string_view v = c;
        if (!v.empty() && v.front() == ':') v.remove_prefix(1);
        if (!v.empty() && v.back() == ':') v.remove_suffix(1);
        if (v.empty()) return false;
        for (char ch : v) {
            if (ch != '-') return false;
        }
    }
    return true;
}

inline std::vector<std::string_view> split_lines(std::string_view src) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= src.size()) {
        std::size_t end = src.find('\n', start);
        if (end == std::string_view::npos) end = src.size();
        std::string_view line = src.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (end == src.size()) break;
        start = end + 1;
    }
    return lines;
}

inline std::string escape_html_text(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string escape_md_cell(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '|') {
            out += "\\|";
        } else if (c == '\n' || c == '\r') {
            out.push_back(' ');
        } else {
            out.push_back(c);
        }
    }
    return out;
}

inline void serialize_html_node(const TableNode& node, std::string& out) {
    const char* name = tag_name(node.label);
    out.push_back('<');
    out += name;
    if (node.label == Tag::Td) {
        if (node.rowspan != 1) {
            out += " rowspan=\"";
            out += std::to_string(node.rowspan);
            out += "\"";
        }
        if (node.colspan != 1) {
            out += " colspan=\"";
            out += std::to_string(node.colspan);
            out += "\"";
        }
    }
    out.push_back('>');
    if (node.label == Tag::Td) out += escape_html_text(node.text);
    for (const TableNode& c : node.children) serialize_html_node(c, out);
    out += "</";
    out += name;
    out.push_back('>');
}

inline bool has_spans(const TableNode& node) {
    if (node.rowspan != 1 || node.colspan != 1) return true;
    for (const TableNode& c : node.children) {
        if (has_spans(c)) return true;
    }
    return false;
}

/// Rows of the tree in document order; Thead/Tbody wrappers are transparent.
inline std::vector<const TableNode*> collect_rows(const TableNode& root) {
    std::vector<const TableNode*> rows;
    for (const TableNode& c : root.children) {
        if (c.label == Tag::Tr) {
            rows.push_back(&c);
        } else if (c.label == Tag::Thead || c.label == Tag::Tbody) {
            for (const TableNode& r : c.children) {
                if (r.label == Tag::Tr) rows.push_back(&r);
            }
        }
    }
    return rows;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

/// Parses the first <table> element of src into a table tree.
///
/// Tags outside {table, thead, tbody, tr, td, th} are skipped transparently
/// with their content hoisted; <th> becomes Td. Unclosed cells and rows are
/// closed implicitly, matching how browsers recover. Throws NoTableFound when
/// no table element exists and MalformedMarkup when the table element is
/// never closed.
inline TableTree parse_html_table(std::string_view src) {
    using namespace detail;

    std::vector<BuildNode> arena;
    std::vector<std::size_t> open; // indices of open elements, root first
    int nested_tables = 0;
    bool started = false;
    bool done = false;

    auto top_label = [&]() { return arena[open.back()].label; };
    auto push_node = [&](Tag label) {
        arena.push_back(BuildNode{label, {}, 1, 1, {}});
        const std::size_t idx = arena.size() - 1;
        if (!open.empty()) arena[open.back()].kids.push_back(idx);
        open.push_back(idx);
        return idx;
    };
    auto pop_while = [&](auto&& pred) {
        while (open.size() > 1 && pred(top_label())) open.pop_back();
    };

    std::size_t pos = 0;
    while (pos < src.size() && !done) {
        if (src[pos] != '<' || !looks_like_markup(src, pos)) {
            if (started && top_label() == Tag::Td) arena[open.back()].raw_text.push_back(src[pos]);
            ++pos;
            continue;
        }
        const std::optional<HtmlTag> tag = read_tag(src, pos);
        if (!tag) continue;

        if (!started) {
            if (!tag->closing && tag->name == "table") {
                push_node(Tag::Table);
                started = true;
            }
            continue;
        }

        if (!tag->closing) {
            if (tag->name == "table") {
                ++nested_tables; // nested tables are out of scope; hoist content
            } else if (tag->name == "thead" || tag->name == "tbody") {
                pop_while([](Tag t) { return t != Tag::Table; });
                push_node(tag->name == "thead" ? Tag::Thead : Tag::Tbody);
                if (tag->self_closing) open.pop_back();
            } else if (tag->name == "tr") {
                pop_while([](Tag t) { return t == Tag::Td || t == Tag::Tr; });
                push_node(Tag::Tr);
                if (tag->self_closing) open.pop_back();
            } else if (tag->name == "td" || tag->name == "th") {
                pop_while([](Tag t) { return t == Tag::Td; });
                if (top_label() != Tag::Tr) push_node(Tag::Tr); // implicit row
                const std::size_t idx = push_node(Tag::Td);
                for (const auto& [key, value] : tag->attrs) {
                    if (key == "rowspan") arena[idx].rowspan = parse_span_attr(value);
                    if (key == "colspan") arena[idx].colspan = parse_span_attr(value);
                }
                if (tag->self_closing) open.pop_back();
            }
            // anything else: hoisted
        } else {
            if (tag->name == "table") {
                if (nested_tables > 0) {
                    --nested_tables;
                } else {
                    done = true;
                }
            } else if (tag->name == "td" || tag->name == "th") {
                if (top_label() == Tag::Td) open.pop_back();
            } else if (tag->name == "tr") {
                pop_while([](Tag t) { return t == Tag::Td; });
                if (top_label() == Tag::Tr) open.pop_back();
            } else if (tag->name == "thead" || tag->name == "tbody") {
                pop_while([](Tag t) { return t == Tag::Td || t == Tag::Tr; });
                if (top_label() == Tag::Thead || top_label() == Tag::Tbody) open.pop_back();
            }
        }
    }

    if (!started) throw NoTableFound("no <table> element in input");
    if (!done) throw MalformedMarkup("unclosed <table> element");

    TableTree tree;
    tree.root = detail::materialize(arena, 0);
    return tree;
}

/// Parses the first pipe table (GFM style) into a grid. The row above the
/// delimiter row is the header; alignment colons are accepted and ignored.
/// Short rows are padded with empty cells, long rows truncated. Throws
/// NoTableFound when no delimiter row exists.
inline GridTable parse_markdown_table(std::string_view src) {
    using namespace detail;

    const std::vector<std::string_view> lines = split_lines(src);
    std::size_t delim = 0;
    bool found = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const bool piped = lines[i].find('|') != std::string_view::npos ||
                           lines[i - 1].find('|') != std::string_view::npos;
        if (piped && !trim(lines[i - 1]).empty() && is_md_delimiter_row(lines[i])) {
            delim = i;
            found = true;
            break;
        }
    }
    if (!found) throw NoTableFound("no markdown table delimiter row in input");

    GridTable grid;
    grid.header_rows = 1;
    grid.cells.push_back(split_md_row(lines[delim - 1]));
    grid.n_cols = grid.cells[0].size();

    for (std::size_t i = delim + 1; i < lines.size(); ++i) {
        if (lines[i].find('|') == std::string_view::npos) break;
        std::vector<std::string> row = split_md_row(lines[i]);
        row.resize(grid.n_cols);
        grid.cells.push_back(std::move(row));
    }
    grid.n_rows = grid.cells.size();
    return grid;
}

/// Parses src in the given format; Markdown is routed through grid_to_tree.
inline TableTree parse_table(std::string_view src, TableFormat fmt) {
    if (fmt == TableFormat::Html) return parse_html_table(src);
    return grid_to_tree(parse_markdown_table(src));
}

/// Canonical serialization. parse(serialize(t)) is structurally equal to t
/// for trees in the target format's representable family. Markdown requires
/// all spans = 1 (SpansNotRepresentable otherwise); its first row in document
/// order becomes the header row.
inline std::string serialize(const TableTree& tree, TableFormat fmt) {
    using namespace detail;

    if (fmt == TableFormat::Html) {
        std::string out;
        serialize_html_node(tree.root, out);
        return out;
    }

    if (has_spans(tree.root)) {
        throw SpansNotRepresentable("markdown cannot express rowspan/colspan > 1");
    }
    const std::vector<const TableNode*> rows = collect_rows(tree.root);
    if (rows.empty()) return "";

    std::size_t n_cols = 1;
    for (const TableNode* row : rows) {
        std::size_t cells_in_row = 0;
        for (const TableNode& c : row->children) {
            if (c.label == Tag::Td) ++cells_in_row;
        }
        n_cols = std::max(n_cols, cells_in_row);
    }

    auto emit_row = [&](const TableNode* row, std::string& out) {
        std::size_t emitted = 0;
        out.push_back('|');
        for (const TableNode& c : row->children) {
            if (c.label != Tag::Td) continue;
            out.push_back(' ');
            out += escape_md_cell(c.text);
            out += " |";
            ++emitted;
        }
        for (; emitted < n_cols; ++emitted) out += "  |";
    };

    std::string out;
    emit_row(rows[0], out);
    out += "\n|";
    for (std::size_t c = 0; c < n_cols; ++c) out += " --- |";
    for (std::size_t r = 1; r < rows.size(); ++r) {
        out.push_back('\n');
        emit_row(rows[r], out);
    }
    return out;
}

} // namespace tablerl
