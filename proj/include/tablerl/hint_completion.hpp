#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tablerl/dataset.hpp"
#include "tablerl/errors.hpp"
#include "tablerl/rng.hpp"

namespace tablerl {

/// A solution already expanded into an ordered list of reasoning steps.
struct SteppedSolution {
    std::string image_ref;
    std::string question;
    std::vector<std::string> steps;
    std::string gold_answer;
};

/// One hint/completion training record: the question augmented with the
/// first split_j steps, and the remaining steps as the completion target.
struct HintCompletionPair {
    std::string image_ref;
    std::string augmented_question;
    std::vector<std::string> hint_steps;
    std::vector<std::string> completion_steps;
    std::size_t split_j = 0;
    std::string gold_answer;
};

namespace detail {

inline std::string join_lines(std::span<const std::string> parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out.push_back('\n');
        out += parts[i];
    }
    return out;
}

} // namespace detail

/// Splits an m-step solution at n_pairs distinct positions j, each drawn
/// uniformly from {1, ..., m-1} without replacement. When fewer interior
/// positions exist than requested, every position is used exactly once.
/// Pairs are returned in ascending j. Throws SolutionTooShort when m < 2.
inline std::vector<HintCompletionPair> split_solution(const SteppedSolution& sol,
                                                      std::size_t n_pairs, Rng& rng) {
    const std::size_t m = sol.steps.size();
    if (m < 2) {
        throw SolutionTooShort("solution has fewer than 2 steps; no interior split point");
    }

    std::vector<std::size_t> positions(m - 1);
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i + 1;

    std::size_t take = std::min(n_pairs, positions.size());
    // Partial Fisher-Yates: the first `take` entries are a uniform
    // without-replacement sample.
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + rng.bounded(positions.size() - i);
        std::swap(positions[i], positions[j]);
    }
    positions.resize(take);
    std::sort(positions.begin(), positions.end());

    std::vector<HintCompletionPair> pairs;
    pairs.reserve(take);
    for (std::size_t j : positions) {
        HintCompletionPair p;
        p.image_ref = sol.image_ref;
        p.split_j = j;
        p.hint_steps.assign(sol.steps.begin(), sol.steps.begin() + static_cast<long>(j));
        p.completion_steps.assign(sol.steps.begin() + static_cast<long>(j), sol.steps.end());
        p.gold_answer = sol.gold_answer;
        p.augmented_question =
            sol.question + "\nHints:\n" + detail::join_lines(p.hint_steps);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

inline std::vector<HintCompletionPair> split_solution(const SteppedSolution& sol,
                                                      std::size_t n_pairs,
                                                      std::uint64_t seed) {
    Rng rng(seed);
    return split_solution(sol, n_pairs, rng);
}

/// Wraps a pair as a reasoning record: the target is the completion steps
/// inside <think> tags followed by the gold answer inside <answer> tags, the
/// envelope the format reward checks for.
inline DatasetRecord assemble_reasoning_record(const HintCompletionPair& pair) {
    DatasetRecord r;
    r.id = pair.image_ref + "#j" + std::to_string(pair.split_j);
    r.image_ref = pair.image_ref;
    r.question = pair.augmented_question;
    r.target = "<think>\n" + detail::join_lines(pair.completion_steps) + "\n</think>\n<answer>" +
               pair.gold_answer + "</answer>";
    r.task = Task::Reasoning;
    return r;
}

} // namespace tablerl
