#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <regex>
#include <string>
#include <string_view>

#include "tablerl/teds.hpp"
#include "tablerl/text.hpp"

namespace tablerl {

/// Accuracy + format decomposition of the reasoning reward; total is their
/// sum, so it only takes values in {0, 1, 2}.
struct RewardBreakdown {
    int accuracy = 0;
    int format = 0;
    double total = 0.0;
};

/// Outcome of the answer comparison pipeline. MathExpr is reserved for
/// callers that plug in a full expression verifier; the built-in pipeline
/// produces Numeric or ExactString.
struct AnswerComparison {
    enum class Mode { ExactString, Numeric, MathExpr };
    Mode mode = Mode::ExactString;
    bool matched = false;
    std::string normalized_pred;
    std::string normalized_gold;
};

/// Content of the first complete <answer>...</answer> pair, trimmed. Absent
/// or unclosed tags yield nothing.
inline std::optional<std::string> extract_answer(std::string_view output) {
    static constexpr std::string_view kOpen = "<answer>";
    static constexpr std::string_view kClose = "</answer>";
    const std::size_t open = output.find(kOpen);
    if (open == std::string_view::npos) return std::nullopt;
    const std::size_t begin = open + kOpen.size();
    const std::size_t close = output.find(kClose, begin);
    if (close == std::string_view::npos) return std::nullopt;
    return std::string(trim(output.substr(begin, close - begin)));
}

namespace detail {

/// Strips separators and decoration the verifier ignores: thousands commas,
/// common currency marks and one trailing percent sign.
inline std::string normalize_answer(std::string_view raw) {
    std::string s = normalize_whitespace(raw);
    static constexpr std::string_view kCurrency[] = {"$", "€", "£", "¥"};
    for (std::string_view cur : kCurrency) {
        std::size_t at;
        while ((at = s.find(cur)) != std::string::npos) s.erase(at, cur.size());
    }
    std::erase(s, ',');
    std::string_view v = trim(s);
    if (!v.empty() && v.back() == '%') v.remove_suffix(1);
    return std::string(trim(v));
}

struct NumericValue {
    bool ok = false;
    double value = 0.0;
};

/// Parses a normalized answer as a number. A short alphabetic tail ("km",
/// "hours") is treated as a unit and ignored, since gold answers are
/// expected unitless.
inline NumericValue parse_numeric(const std::string& s) {
    if (s.empty()) return {};
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || !std::isfinite(v)) return {};
    std::string_view rest = trim(std::string_view(end));
    if (rest.empty()) return {true, v};
    if (rest.size() <= 12) {
        bool alpha = true;
        for (char c : rest) {
            if (!std::isalpha(static_cast<unsigned char>(c))) {
                alpha = false;
                break;
            }
        }
        if (alpha) return {true, v};
    }
    return {};
}

} // namespace detail

/// Comparison pipeline: strip separators/currency/percent, compare
/// numerically when both sides parse (|pred - gold| <= max(abs_tol,
/// rel_tol * |gold|)), otherwise case-insensitive string equality.
inline AnswerComparison compare_answers(std::string_view pred, std::string_view gold,
                                        double rel_tol = 1e-6, double abs_tol = 1e-9) {
    AnswerComparison cmp;
    cmp.normalized_pred = detail::normalize_answer(pred);
    cmp.normalized_gold = detail::normalize_answer(gold);

    const detail::NumericValue np = detail::parse_numeric(cmp.normalized_pred);
    const detail::NumericValue ng = detail::parse_numeric(cmp.normalized_gold);
    if (np.ok && ng.ok) {
        cmp.mode = AnswerComparison::Mode::Numeric;
        cmp.matched = std::fabs(np.value - ng.value) <=
                      std::max(abs_tol, rel_tol * std::fabs(ng.value));
        return cmp;
    }
    cmp.mode = AnswerComparison::Mode::ExactString;
    cmp.matched = to_lower(cmp.normalized_pred) == to_lower(cmp.normalized_gold);
    return cmp;
}

/// 1 iff an answer can be extracted and matches the gold answer.
inline int accuracy_reward(std::string_view output, std::string_view gold) {
    const std::optional<std::string> answer = extract_answer(output);
    if (!answer) return 0;
    return compare_answers(*answer, gold).matched ? 1 : 0;
}

/// 1 iff the whole output is exactly one <think> block followed by one
/// <answer> block, with nothing but whitespace around them. Block contents
/// may span newlines.
inline int format_reward(std::string_view output) {
    static const std::regex kEnvelope(
        R"(^\s*<think>[\s\S]*?</think>\s*<answer>[\s\S]*?</answer>\s*$)");
    return std::regex_match(output.begin(), output.end(), kEnvelope) ? 1 : 0;
}

/// Reasoning-task reward: accuracy + format.
inline RewardBreakdown reasoning_reward(std::string_view output, std::string_view gold) {
    RewardBreakdown r;
    r.accuracy = accuracy_reward(output, gold);
    r.format = format_reward(output);
    r.total = static_cast<double>(r.accuracy + r.format);
    return r;
}

/// Perception-task reward: the TEDS similarity of the predicted table
/// against the gold table, unshaped.
inline double perception_reward(std::string_view pred_src, std::string_view gold_src,
                                TableFormat fmt) {
    return teds_from_strings(pred_src, gold_src, fmt).similarity;
}

} // namespace tablerl
