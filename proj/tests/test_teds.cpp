#include <doctest.h>

#include <cmath>

#include "support/table_gen.hpp"
#include "support/ted_oracle.hpp"
#include "tablerl/levenshtein.hpp"
#include "tablerl/teds.hpp"

using namespace tablerl;
using testsupport::ted_oracle;

TEST_CASE("levenshtein basics") {
    CHECK(levenshtein("", "") == 0);
    CHECK(levenshtein("abc", "abc") == 0);
    CHECK(levenshtein("a", "b") == 1);
    CHECK(levenshtein("kitten", "sitting") == 3);
    CHECK(levenshtein("", "abc") == 3);

    CHECK(normalized_levenshtein("", "") == 0.0);
    CHECK(normalized_levenshtein("", "x") == 1.0);
    CHECK(normalized_levenshtein("a", "b") == 1.0);
    CHECK(normalized_levenshtein("ab", "aa") == doctest::Approx(0.5));
}

TEST_CASE("default cost model: identity, symmetry, range") {
    Rng rng(53);
    const Tag tags[] = {Tag::Table, Tag::Thead, Tag::Tbody, Tag::Tr, Tag::Td};
    for (int trial = 0; trial < 500; ++trial) {
        TableNode a, b;
        a.label = tags[rng.bounded(5)];
        b.label = tags[rng.bounded(5)];
        if (a.label == Tag::Td) {
            a.text = testsupport::random_cell_text(rng);
            a.colspan = 1 + static_cast<int>(rng.bounded(3));
        }
        if (b.label == Tag::Td) {
            b.text = testsupport::random_cell_text(rng);
            b.rowspan = 1 + static_cast<int>(rng.bounded(3));
        }
        CHECK(default_rename_cost(a, a) == 0.0);
        CHECK(default_rename_cost(a, b) == default_rename_cost(b, a));
        CHECK(default_rename_cost(a, b) >= 0.0);
        CHECK(default_rename_cost(a, b) <= 1.0);
    }
}

TEST_CASE("rename cost: labels, text, spans") {
    CHECK(default_rename_cost(cell("a"), cell("a")) == 0.0);
    CHECK(default_rename_cost(elem(Tag::Tr), elem(Tag::Tr)) == 0.0);
    CHECK(default_rename_cost(elem(Tag::Tr), cell("a")) == 1.0);
    CHECK(default_rename_cost(cell("a"), cell("b")) == 1.0);
    CHECK(default_rename_cost(cell("ab"), cell("aa")) == doctest::Approx(0.5));
    // Span mismatch adds 1, capped at 1 total.
    CHECK(default_rename_cost(cell("a"), cell("a", 2)) == 1.0);
    CHECK(default_rename_cost(cell("ab", 1, 2), cell("aa")) == 1.0);
}

TEST_CASE("tree_edit_distance on the hand-checked cases") {
    const TableTree a = make_table({elem(Tag::Tr, {cell("a")})});
    const TableTree b = make_table({elem(Tag::Tr, {cell("b")})});

    CHECK(tree_edit_distance(a, a) == 0.0);
    CHECK(tree_edit_distance(a, b) == 1.0);

    const TableTree two_cells = make_table({elem(Tag::Tr, {cell("a"), cell("a")})});
    const TableTree one_cell = make_table({elem(Tag::Tr, {cell("a")})});
    CHECK(tree_edit_distance(two_cells, one_cell) == 1.0);

    // The independent mapping-search oracle agrees.
    CHECK(ted_oracle(a, b) == 1.0);
    CHECK(ted_oracle(two_cells, one_cell) == 1.0);
}

TEST_CASE("teds scores") {
    const TableTree t = make_table({
        elem(Tag::Tr, {cell("a"), cell("b")}),
        elem(Tag::Tr, {cell("c"), cell("d")}),
    }); // 7 nodes

    SUBCASE("perfect match") {
        const TedsScore s = teds(t, t);
        CHECK(s.similarity == 1.0);
        CHECK(s.distance == 0.0);
        CHECK(s.max_size == 7);
    }
    SUBCASE("one cell fully replaced") {
        Rng rng(3);
        const TableTree p = testsupport::perturb_cells(t, 1, rng);
        const TedsScore s = teds(p, t);
        CHECK(s.distance == 1.0);
        CHECK(s.similarity == doctest::Approx(1.0 - 1.0 / 7.0));
        CHECK(ted_oracle(p, t) == 1.0);
    }
    SUBCASE("bare root against the 7-node table") {
        const TedsScore s = teds(make_table(), t);
        CHECK(s.distance == 6.0);
        CHECK(s.similarity == doctest::Approx(1.0 - 6.0 / 7.0));
        CHECK(ted_oracle(make_table(), t) == 6.0);
    }
}

TEST_CASE("teds_from_strings") {
    const char* md = "| a | b |\n| --- | --- |\n| 1 | 2 |";

    SUBCASE("identical strings score 1") {
        const TedsScore s = teds_from_strings(md, md, TableFormat::Markdown);
        CHECK(s.similarity == 1.0);
    }
    SUBCASE("unparseable prediction scores 0") {
        const TedsScore s = teds_from_strings("garbage", md, TableFormat::Markdown);
        CHECK(s.similarity == 0.0);
        CHECK(s.max_size == 9);
    }
    SUBCASE("one differing cell on 9-node trees") {
        const char* changed = "| a | b |\n| --- | --- |\n| 1 | X |";
        const TedsScore s = teds_from_strings(changed, md, TableFormat::Markdown);
        CHECK(s.distance == 1.0);
        CHECK(s.similarity == doctest::Approx(1.0 - 1.0 / 9.0));
    }
    SUBCASE("unparseable gold raises GoldUnparseable") {
        CHECK_THROWS_AS(teds_from_strings(md, "garbage", TableFormat::Markdown),
                        GoldUnparseable);
    }
    SUBCASE("html route") {
        const char* html = "<table><tr><td>a</td></tr></table>";
        CHECK(teds_from_strings(html, html, TableFormat::Html).similarity == 1.0);
    }
}

TEST_CASE("teds reflexivity, symmetry and range on random tables") {
    Rng rng(11);
    testsupport::TableGenOptions opt;
    opt.allow_spans = true;
    for (int trial = 0; trial < 60; ++trial) {
        const TableTree a = testsupport::random_table(rng, opt);
        const TableTree b = testsupport::random_table(rng, opt);

        CHECK(teds(a, a).similarity == 1.0);
        CHECK(tree_edit_distance(a, b) == tree_edit_distance(b, a));

        const double sim = teds(a, b).similarity;
        CHECK(sim >= 0.0);
        CHECK(sim <= 1.0);
    }
}

TEST_CASE("perturbing k cells moves the distance by exactly k") {
    Rng rng(13);
    for (int trial = 0; trial < 25; ++trial) {
        const TableTree t = testsupport::random_table(rng);
        std::vector<TableNode*> cells;
        TableTree scratch = t;
        testsupport::collect_cells(scratch.root, cells);
        const std::size_t k = 1 + rng.bounded(cells.size());

        const TableTree p = testsupport::perturb_cells(t, k, rng);
        const TedsScore s = teds(p, t);
        const double n = static_cast<double>(tree_size(t));
        CHECK(s.distance == static_cast<double>(k));
        CHECK(s.similarity == 1.0 - static_cast<double>(k) / n);
    }
}

TEST_CASE("matches the exhaustive mapping oracle on random small pairs") {
    Rng rng(17);
    const testsupport::TreeEnumerator enumerator(4);
    const std::vector<const TableNode*> all = enumerator.all_trees();
    for (int trial = 0; trial < 4000; ++trial) {
        const TableNode* a = all[rng.bounded(all.size())];
        const TableNode* b = all[rng.bounded(all.size())];
        const double fast = tree_edit_distance(*a, *b);
        const double brute = ted_oracle(*a, *b);
        CHECK(fast == brute);
    }
}
