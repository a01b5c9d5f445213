#pragma once

#include <algorithm>
#include <cstddef>
#include <string_view>
#include <vector>

namespace tablerl {

/// Classic single-row Levenshtein distance (unit insert/delete/substitute).
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() > b.size()) std::swap(a, b);
    const std::size_t m = a.size();
    const std::size_t n = b.size();
    if (m == 0) return n;

    std::vector<std::size_t> row(m + 1);
    for (std::size_t i = 0; i <= m; ++i) row[i] = i;

    for (std::size_t j = 1; j <= n; ++j) {
        std::size_t corner = row[0];
        row[0] = j;
        for (std::size_t i = 1; i <= m; ++i) {
            const std::size_t upper = row[i];
            const std::size_t subst = corner + (a[i - 1] == b[j - 1] ? 0 : 1);
            row[i] = std::min({upper + 1, row[i - 1] + 1, subst});
            corner = upper;
        }
    }
    return row[m];
}

/// Levenshtein distance divided by max length, in [0, 1]. Two empty strings
/// are identical (0); empty against non-empty is a full mismatch (1).
inline double normalized_levenshtein(std::string_view a, std::string_view b) {
    const std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 0.0;
    return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

} // namespace tablerl
