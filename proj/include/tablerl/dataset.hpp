#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tablerl/errors.hpp"
#include "tablerl/rng.hpp"
#include "tablerl/text.hpp"

namespace tablerl {

enum class Task { Perception, Reasoning };

inline const char* task_name(Task t) {
    return t == Task::Perception ? "perception" : "reasoning";
}

/// One training example flowing through the construction pipeline. image_ref
/// identifies the source table image; records sharing it are questions about
/// the same table. Dimensions come from record metadata, not decoded pixels.
struct DatasetRecord {
    std::string id;
    std::string image_ref;
    std::int64_t image_width = 1;
    std::int64_t image_height = 1;
    std::string question;
    std::string target;
    Task task = Task::Reasoning;
    std::string source_dataset;

    bool operator==(const DatasetRecord&) const = default;
};

struct FilterConfig {
    // 1/8 of a 12,845,056-pixel maximum input resolution.
    std::int64_t max_pixels = 1'605'632;
    std::size_t max_target_tokens = 2048;
    std::size_t sample_size = 8000;
    std::uint64_t seed = 0;

    void validate() const {
        if (max_pixels <= 0) throw ConfigError("max_pixels must be positive");
        if (max_target_tokens == 0) throw ConfigError("max_target_tokens must be positive");
        if (sample_size == 0) throw ConfigError("sample_size must be positive");
    }
};

/// Token counters are injected so any tokenizer can be plugged in; the
/// default counts whitespace-delimited tokens.
using TokenCounter = std::function<std::size_t(std::string_view)>;

inline std::size_t whitespace_token_count(std::string_view s) {
    std::size_t count = 0;
    bool in_token = false;
    for (char c : s) {
        const bool space = is_space(c);
        if (!space && !in_token) ++count;
        in_token = !space;
    }
    return count;
}

/// Filters partition their input: kept and dropped are disjoint and together
/// equal the input, order preserved.
struct FilterResult {
    std::vector<DatasetRecord> kept;
    std::vector<DatasetRecord> dropped;
};

/// Keeps records whose pixel count (width * height) does not exceed
/// cfg.max_pixels. The boundary is inclusive: exactly max_pixels is kept.
inline FilterResult pixel_filter(std::span<const DatasetRecord> records,
                                 const FilterConfig& cfg) {
    cfg.validate();
    FilterResult out;
    for (const DatasetRecord& r : records) {
        const std::int64_t pixels = r.image_width * r.image_height;
        (pixels <= cfg.max_pixels ? out.kept : out.dropped).push_back(r);
    }
    return out;
}

/// Drops perception records whose target exceeds cfg.max_target_tokens under
/// the supplied counter. Reasoning records pass untouched; the length limit
/// exists to bound generated table size, which only the perception task hits.
inline FilterResult length_filter(std::span<const DatasetRecord> records,
                                  const FilterConfig& cfg,
                                  const TokenCounter& counter = whitespace_token_count) {
    cfg.validate();
    FilterResult out;
    for (const DatasetRecord& r : records) {
        const bool keep =
            r.task != Task::Perception || counter(r.target) <= cfg.max_target_tokens;
        (keep ? out.kept : out.dropped).push_back(r);
    }
    return out;
}

/// Table-first random sampling: distinct image refs are shuffled by seed,
/// then each image's questions are appended in input order until sample_size
/// records are collected (all records when the corpus is smaller). A table's
/// question set may be split by the cutoff. Deterministic under seed.
inline std::vector<DatasetRecord> sample_records(std::span<const DatasetRecord> records,
                                                 const FilterConfig& cfg) {
    cfg.validate();
    if (records.size() <= cfg.sample_size) {
        return std::vector<DatasetRecord>(records.begin(), records.end());
    }

    std::unordered_map<std::string_view, std::size_t> slot_of;
    std::vector<std::vector<std::size_t>> by_image; // record indices per image, first-seen order
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::string_view key =
            records[i].image_ref.empty() ? std::string_view(records[i].id)
                                         : std::string_view(records[i].image_ref);
        auto [it, inserted] = slot_of.try_emplace(key, by_image.size());
        if (inserted) by_image.emplace_back();
        by_image[it->second].push_back(i);
    }

    std::vector<std::size_t> order(by_image.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(cfg.seed);
    rng.shuffle(order);

    std::vector<DatasetRecord> out;
    out.reserve(cfg.sample_size);
    for (std::size_t img : order) {
        for (std::size_t idx : by_image[img]) {
            if (out.size() == cfg.sample_size) return out;
            out.push_back(records[idx]);
        }
    }
    return out;
}

/// A table image with its golden structured representation, the raw material
/// for perception records.
struct PerceptionSource {
    std::string image_ref;
    std::int64_t width = 1;
    std::int64_t height = 1;
    std::string golden_table;
    std::string source_dataset;
};

/// Instruction variants for the image-to-table transcription task. One is
/// drawn uniformly per record.
inline std::span<const std::string_view> perception_instruction_variants() {
    static constexpr std::string_view kVariants[] = {
        "Please read the table in this image and return a markdown-style reconstructed table in text.",
        "Take a look at the table in this image and provide me with the markdown representation of the table in text format.",
        "Read the shown table in this image and give me the reconstructed table in the markdown text format.",
        "Watch the table in this image and convert it into a Markdown table in the text form.",
        "Given a table image, can you convert the table into a Markdown table in text form?",
        "Reconstruct the table in this picture as a markdown-style table in text.",
        "Please review this table image and return a text representation of the table in the markdown format.",
        "Examine the table in the shown picture and generate a markdown text representation of the table.",
        "Watch this table and show a markdown-style reconstructed table in text.",
        "This picture illustrates a table. Please represent this table with the markdown format in text.",
        "Recognize the table in the presented picture and represent it in the markdown format.",
        "Recognize the table in this picture and return a markdown-style reconstructed table in text.",
        "Can you interpret the table in this image and return it as a markdown table in text?",
        "Look at the table in this image and reconstruct it as a markdown table in text format.",
        "Identify the table in this image and provide its markdown text representation.",
        "Please examine the table in this image and return it as a markdown table in text format.",
        "Can you read the table in this image and give me the markdown table in text?",
        "Please look at the table in this image and provide the markdown table in text format.",
    };
    return kVariants;
}

/// Builds one perception record per image: a uniformly chosen instruction
/// variant as the question and the image's golden table as the target.
/// Throws ConfigError on an empty variant list.
inline std::vector<DatasetRecord> make_perception_records(
    std::span<const PerceptionSource> images,
    std::span<const std::string_view> variants = perception_instruction_variants(),
    std::uint64_t seed = 0) {
    if (variants.empty()) throw ConfigError("perception instruction variant list is empty");

    std::vector<DatasetRecord> out;
    out.reserve(images.size());
    Rng rng(seed);
    for (const PerceptionSource& img : images) {
        DatasetRecord r;
        r.id = img.image_ref;
        r.image_ref = img.image_ref;
        r.image_width = img.width;
        r.image_height = img.height;
        r.question = std::string(variants[rng.bounded(variants.size())]);
        r.target = img.golden_table;
        r.task = Task::Perception;
        r.source_dataset = img.source_dataset;
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace tablerl
