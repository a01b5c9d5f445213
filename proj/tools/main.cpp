// Command-line surface over the library: batch TEDS scoring, reward
// evaluation, hint-completion splitting, dataset filtering, and the
// reward-variance simulator. Data goes to stdout, summaries and the run
// manifest to stderr, so commands compose in shell pipelines. Every command
// is a pure function of (input files, flags, seed).
//
// Exit codes: 0 success, 1 usage/IO/schema error, 2 data integrity error
// (an unparseable golden answer).

#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tablerl/tablerl.hpp"

using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDataIntegrity = 2;

std::string fmt_double(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Per-run manifest emitted on stderr: what ran, a stable hash of its
/// configuration, record counts, the seed, and wall time.
class Manifest {
public:
    Manifest(std::string command, std::string canonical_config, std::uint64_t seed)
        : command_(std::move(command)),
          config_hash_(fnv1a_hex(command_ + "|" + canonical_config)),
          seed_(seed),
          start_(std::chrono::steady_clock::now()) {}

    void set_counts(std::size_t in, std::size_t out) {
        input_count_ = in;
        output_count_ = out;
    }
    ordered_json& extra() { return extra_; }

    void emit() const {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        ordered_json j;
        j["command"] = command_;
        j["config_hash"] = config_hash_;
        j["input_count"] = input_count_;
        j["output_count"] = output_count_;
        j["seed"] = seed_;
        j["wall_time_ms"] =
            std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
        for (auto& [k, v] : extra_.items()) j[k] = v;
        std::cerr << j.dump() << "\n";
    }

private:
    std::string command_;
    std::string config_hash_;
    std::uint64_t seed_;
    std::size_t input_count_ = 0;
    std::size_t output_count_ = 0;
    ordered_json extra_;
    std::chrono::steady_clock::time_point start_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw tablerl::Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw tablerl::Error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

/// Thrown on malformed input records; carries the 1-based line number.
struct SchemaError {
    std::size_t line;
    std::string what;
};

ordered_json parse_record(const std::string& line, std::size_t line_no) {
    try {
        return ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError{line_no, e.what()};
    }
}

std::string require_string(const ordered_json& j, const char* key, std::size_t line_no) {
    if (!j.contains(key) || !j[key].is_string()) {
        throw SchemaError{line_no, std::string("missing string field '") + key + "'"};
    }
    return j[key].get<std::string>();
}

tablerl::TableFormat parse_format(const std::string& name, std::size_t line_no = 0) {
    if (name == "html") return tablerl::TableFormat::Html;
    if (name == "markdown") return tablerl::TableFormat::Markdown;
    throw SchemaError{line_no, "unknown format '" + name + "' (expected html or markdown)"};
}

tablerl::DegeneratePolicy parse_policy(const std::string& name) {
    if (name == "zeroout") return tablerl::DegeneratePolicy::ZeroOut;
    if (name == "skip") return tablerl::DegeneratePolicy::Skip;
    throw tablerl::ConfigError("unknown degeneracy policy '" + name + "'");
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

// ---------------------------------------------------------------------------
// teds
// ---------------------------------------------------------------------------

struct TedsOptions {
    std::string pred_file;
    std::string gold_file;
    std::string jsonl_file;
    std::string format = "markdown";
};

int run_teds(const TedsOptions& opt) {
    Manifest manifest("teds",
                      "format=" + opt.format + ";jsonl=" + opt.jsonl_file +
                          ";pred=" + opt.pred_file + ";gold=" + opt.gold_file,
                      0);
    const tablerl::TableFormat default_fmt = parse_format(opt.format);

    struct Job {
        std::string id;
        std::string pred;
        std::string gold;
        tablerl::TableFormat fmt;
    };
    std::vector<Job> jobs;

    if (!opt.jsonl_file.empty()) {
        const std::vector<std::string> lines = read_lines(opt.jsonl_file);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (tablerl::trim(lines[i]).empty()) continue;
            const ordered_json j = parse_record(lines[i], i + 1);
            Job job;
            job.id = require_string(j, "id", i + 1);
            job.pred = require_string(j, "pred", i + 1);
            job.gold = require_string(j, "gold", i + 1);
            job.fmt = j.contains("format")
                          ? parse_format(j["format"].get<std::string>(), i + 1)
                          : default_fmt;
            jobs.push_back(std::move(job));
        }
    } else {
        if (opt.pred_file.empty() || opt.gold_file.empty()) {
            throw tablerl::ConfigError("teds needs either --jsonl or both --pred and --gold");
        }
        jobs.push_back({opt.pred_file, read_file(opt.pred_file), read_file(opt.gold_file),
                        default_fmt});
    }

    int rc = kExitOk;
    double sum_similarity = 0.0;
    std::size_t scored = 0;
    for (const Job& job : jobs) {
        ordered_json out;
        out["id"] = job.id;
        try {
            const tablerl::TedsScore s = tablerl::teds_from_strings(job.pred, job.gold, job.fmt);
            out["similarity"] = s.similarity;
            out["distance"] = s.distance;
            out["max_size"] = s.max_size;
            sum_similarity += s.similarity;
            ++scored;
        } catch (const tablerl::GoldUnparseable& e) {
            out["error"] = "gold_unparseable";
            out["detail"] = e.what();
            rc = kExitDataIntegrity;
        }
        std::cout << out.dump() << "\n";
    }

    manifest.set_counts(jobs.size(), jobs.size());
    manifest.extra()["scored"] = scored;
    manifest.extra()["mean_similarity"] = scored == 0 ? 0.0 : sum_similarity / scored;
    manifest.emit();
    return rc;
}

// ---------------------------------------------------------------------------
// reward
// ---------------------------------------------------------------------------

struct RewardOptions {
    std::string jsonl_file;
    std::string format = "markdown";
};

int run_reward(const RewardOptions& opt) {
    Manifest manifest("reward", "format=" + opt.format + ";jsonl=" + opt.jsonl_file, 0);
    const tablerl::TableFormat default_fmt = parse_format(opt.format);

    const std::vector<std::string> lines = read_lines(opt.jsonl_file);
    int rc = kExitOk;
    std::size_t records = 0;
    std::size_t reasoning_totals[3] = {0, 0, 0};
    double perception_sum = 0.0;
    std::size_t perception_count = 0;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (tablerl::trim(lines[i]).empty()) continue;
        const ordered_json j = parse_record(lines[i], i + 1);
        const std::string task = require_string(j, "task", i + 1);
        const std::string output = require_string(j, "output", i + 1);
        const std::string gold = require_string(j, "gold", i + 1);
        const std::string id = require_string(j, "id", i + 1);
        ++records;

        ordered_json out;
        out["id"] = id;
        if (task == "reasoning") {
            const tablerl::RewardBreakdown r = tablerl::reasoning_reward(output, gold);
            out["accuracy"] = r.accuracy;
            out["format"] = r.format;
            out["total"] = r.total;
            reasoning_totals[r.accuracy + r.format] += 1;
        } else if (task == "perception") {
            const tablerl::TableFormat fmt =
                j.contains("format") ? parse_format(j["format"].get<std::string>(), i + 1)
                                     : default_fmt;
            try {
                const double sim = tablerl::perception_reward(output, gold, fmt);
                out["similarity"] = sim;
                out["total"] = sim;
                perception_sum += sim;
                ++perception_count;
            } catch (const tablerl::GoldUnparseable& e) {
                out["error"] = "gold_unparseable";
                out["detail"] = e.what();
                rc = kExitDataIntegrity;
            }
        } else {
            throw SchemaError{i + 1, "unknown task '" + task + "'"};
        }
        std::cout << out.dump() << "\n";
    }

    manifest.set_counts(records, records);
    ordered_json hist;
    hist["0"] = reasoning_totals[0];
    hist["1"] = reasoning_totals[1];
    hist["2"] = reasoning_totals[2];
    manifest.extra()["reasoning_totals"] = hist;
    manifest.extra()["perception_count"] = perception_count;
    manifest.extra()["perception_mean_similarity"] =
        perception_count == 0 ? 0.0 : perception_sum / perception_count;
    manifest.emit();
    return rc;
}

// ---------------------------------------------------------------------------
// split
// ---------------------------------------------------------------------------

struct SplitOptions {
    std::string jsonl_file;
    std::size_t pairs = 3;
    std::uint64_t seed = 0;
};

int run_split(const SplitOptions& opt) {
    Manifest manifest("split",
                      "pairs=" + std::to_string(opt.pairs) + ";jsonl=" + opt.jsonl_file,
                      opt.seed);

    const std::vector<std::string> lines = read_lines(opt.jsonl_file);
    std::size_t records = 0;
    std::size_t emitted = 0;
    std::size_t skipped_too_short = 0;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (tablerl::trim(lines[i]).empty()) continue;
        const ordered_json j = parse_record(lines[i], i + 1);

        tablerl::SteppedSolution sol;
        sol.image_ref = require_string(j, "image", i + 1);
        sol.question = require_string(j, "question", i + 1);
        sol.gold_answer = require_string(j, "answer", i + 1);
        if (!j.contains("steps") || !j["steps"].is_array()) {
            throw SchemaError{i + 1, "missing array field 'steps'"};
        }
        for (const auto& s : j["steps"]) {
            if (!s.is_string()) throw SchemaError{i + 1, "'steps' must hold strings"};
            sol.steps.push_back(s.get<std::string>());
        }
        ++records;

        std::vector<tablerl::HintCompletionPair> pairs;
        try {
            // Per-record derived seed: output does not depend on how many
            // records preceded a given one being reprocessed in isolation.
            pairs = tablerl::split_solution(sol, opt.pairs,
                                            tablerl::Rng::derive(opt.seed, records - 1));
        } catch (const tablerl::SolutionTooShort&) {
            ++skipped_too_short;
            std::cerr << "line " << (i + 1) << ": solution too short to split, skipped\n";
            continue;
        }
        for (const tablerl::HintCompletionPair& p : pairs) {
            ordered_json out;
            out["image"] = p.image_ref;
            out["question_aug"] = p.augmented_question;
            out["hint"] = p.hint_steps;
            out["completion"] = p.completion_steps;
            out["split_j"] = p.split_j;
            out["answer"] = p.gold_answer;
            std::cout << out.dump() << "\n";
            ++emitted;
        }
    }

    manifest.set_counts(records, emitted);
    manifest.extra()["skipped_too_short"] = skipped_too_short;
    manifest.emit();
    return kExitOk;
}

// ---------------------------------------------------------------------------
// filter
// ---------------------------------------------------------------------------

struct FilterOptions {
    std::string jsonl_file;
    tablerl::FilterConfig cfg;
};

tablerl::DatasetRecord record_from_json(const ordered_json& j, std::size_t line_no) {
    tablerl::DatasetRecord r;
    r.id = require_string(j, "id", line_no);
    r.image_ref = j.value("image", r.id);
    if (!j.contains("image_width") || !j.contains("image_height") ||
        !j["image_width"].is_number() || !j["image_height"].is_number()) {
        throw SchemaError{line_no, "missing numeric fields 'image_width'/'image_height'"};
    }
    r.image_width = j["image_width"].get<std::int64_t>();
    r.image_height = j["image_height"].get<std::int64_t>();
    r.question = require_string(j, "question", line_no);
    r.target = require_string(j, "target", line_no);
    const std::string task = require_string(j, "task", line_no);
    if (task == "perception") {
        r.task = tablerl::Task::Perception;
    } else if (task == "reasoning") {
        r.task = tablerl::Task::Reasoning;
    } else {
        throw SchemaError{line_no, "unknown task '" + task + "'"};
    }
    r.source_dataset = j.value("source_dataset", "");
    return r;
}

ordered_json record_to_json(const tablerl::DatasetRecord& r) {
    ordered_json j;
    j["id"] = r.id;
    j["image"] = r.image_ref;
    j["image_width"] = r.image_width;
    j["image_height"] = r.image_height;
    j["question"] = r.question;
    j["target"] = r.target;
    j["task"] = tablerl::task_name(r.task);
    j["source_dataset"] = r.source_dataset;
    return j;
}

int run_filter(const FilterOptions& opt) {
    Manifest manifest("filter",
                      "max_pixels=" + std::to_string(opt.cfg.max_pixels) +
                          ";max_tokens=" + std::to_string(opt.cfg.max_target_tokens) +
                          ";sample=" + std::to_string(opt.cfg.sample_size) +
                          ";jsonl=" + opt.jsonl_file,
                      opt.cfg.seed);
    opt.cfg.validate();

    const std::vector<std::string> lines = read_lines(opt.jsonl_file);
    std::vector<tablerl::DatasetRecord> records;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (tablerl::trim(lines[i]).empty()) continue;
        records.push_back(record_from_json(parse_record(lines[i], i + 1), i + 1));
    }

    const tablerl::FilterResult px = tablerl::pixel_filter(records, opt.cfg);
    const tablerl::FilterResult len = tablerl::length_filter(px.kept, opt.cfg);
    const std::vector<tablerl::DatasetRecord> sampled =
        tablerl::sample_records(len.kept, opt.cfg);

    for (const tablerl::DatasetRecord& r : sampled) {
        std::cout << record_to_json(r).dump() << "\n";
    }

    manifest.set_counts(records.size(), sampled.size());
    manifest.extra()["kept"] = len.kept.size();
    manifest.extra()["dropped_pixel"] = px.dropped.size();
    manifest.extra()["dropped_length"] = len.dropped.size();
    manifest.extra()["sampled"] = sampled.size();
    manifest.emit();
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::string p_init_csv = "0.5";
    int steps = 200;
    int group_size = 4;
    int seeds = 1;
    std::uint64_t seed = 0;
    double lr = 0.05;
    std::string policy = "zeroout";
};

int run_simulate(const SimulateOptions& opt) {
    Manifest manifest("simulate",
                      "p_init=" + opt.p_init_csv + ";steps=" + std::to_string(opt.steps) +
                          ";group_size=" + std::to_string(opt.group_size) +
                          ";seeds=" + std::to_string(opt.seeds) + ";lr=" + fmt_double(opt.lr) +
                          ";policy=" + opt.policy,
                      opt.seed);

    tablerl::GrpoConfig cfg;
    cfg.group_size = opt.group_size;
    cfg.degenerate_policy = parse_policy(opt.policy);
    cfg.seed = opt.seed;
    cfg.validate();
    if (opt.seeds < 1) throw tablerl::ConfigError("--seeds must be >= 1");

    const std::vector<double> p_inits = parse_double_list(opt.p_init_csv);
    if (p_inits.empty()) throw tablerl::ConfigError("--p-init needs at least one value");

    std::cout << "p_init,seed,step,p\n";
    std::ostringstream summary;
    summary << "p_init,seed,p_final,delta,variance_init,zero_variance_fraction\n";

    std::size_t runs = 0;
    for (const double p_init : p_inits) {
        for (int k = 0; k < opt.seeds; ++k) {
            const std::uint64_t run_seed = tablerl::Rng::derive(opt.seed, runs);
            const tablerl::SimReport r =
                tablerl::train_toy_policy(p_init, opt.steps, cfg, opt.lr, run_seed);
            for (const auto& [step, p] : r.trajectory) {
                std::cout << fmt_double(p_init) << "," << k << "," << step << ","
                          << fmt_double(p) << "\n";
            }
            summary << fmt_double(p_init) << "," << k << "," << fmt_double(r.p_final) << ","
                    << fmt_double(r.delta) << "," << fmt_double(r.variance_init) << ","
                    << fmt_double(r.zero_variance_group_fraction) << "\n";
            ++runs;
        }
    }

    std::cerr << summary.str();
    manifest.set_counts(p_inits.size(), runs);
    manifest.emit();
    return kExitOk;
}

// ---------------------------------------------------------------------------
// advantages
// ---------------------------------------------------------------------------

struct AdvantagesOptions {
    std::string rewards_csv;
    std::string jsonl_file;
    std::string policy = "zeroout";
};

int run_advantages(const AdvantagesOptions& opt) {
    Manifest manifest("advantages", "policy=" + opt.policy + ";jsonl=" + opt.jsonl_file, 0);
    const tablerl::DegeneratePolicy policy = parse_policy(opt.policy);

    auto emit = [&](const std::optional<std::string>& id, std::span<const double> rewards,
                    std::size_t line_no) {
        std::optional<std::vector<double>> adv;
        try {
            adv = tablerl::group_advantages(rewards, policy);
        } catch (const tablerl::GroupTooSmall& e) {
            throw SchemaError{line_no, e.what()};
        }
        ordered_json out;
        if (id) out["id"] = *id;
        if (adv) {
            out["advantages"] = *adv;
        } else {
            out["skipped"] = true;
        }
        std::cout << out.dump() << "\n";
    };

    std::size_t records = 0;
    if (!opt.jsonl_file.empty()) {
        const std::vector<std::string> lines = read_lines(opt.jsonl_file);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (tablerl::trim(lines[i]).empty()) continue;
            const ordered_json j = parse_record(lines[i], i + 1);
            if (!j.contains("rewards") || !j["rewards"].is_array()) {
                throw SchemaError{i + 1, "missing array field 'rewards'"};
            }
            const std::vector<double> rewards = j["rewards"].get<std::vector<double>>();
            emit(require_string(j, "id", i + 1), rewards, i + 1);
            ++records;
        }
    } else {
        if (opt.rewards_csv.empty()) {
            throw tablerl::ConfigError("advantages needs either --rewards or --jsonl");
        }
        const std::vector<double> rewards = parse_double_list(opt.rewards_csv);
        emit(std::nullopt, rewards, 0);
        records = 1;
    }

    manifest.set_counts(records, records);
    manifest.emit();
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Table-understanding RL toolkit: TEDS scoring, rule-based rewards, "
                 "hint-completion data construction, dataset filters, and a "
                 "reward-variance simulator"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Config file; keys mirror the long option names");

    TedsOptions teds_opt;
    CLI::App* teds = app.add_subcommand("teds", "Score predicted tables against golden tables");
    teds->add_option("--pred", teds_opt.pred_file, "File holding one predicted table");
    teds->add_option("--gold", teds_opt.gold_file, "File holding one golden table");
    teds->add_option("--jsonl", teds_opt.jsonl_file,
                     "JSONL batch: {id, pred, gold, format?} per line");
    teds->add_option("--format", teds_opt.format, "Default table format: html or markdown")
        ->check(CLI::IsMember({"html", "markdown"}));

    RewardOptions reward_opt;
    CLI::App* reward =
        app.add_subcommand("reward", "Evaluate reward breakdowns for model outputs");
    reward->add_option("--jsonl", reward_opt.jsonl_file,
                       "JSONL batch: {id, output, gold, task, format?} per line")
        ->required();
    reward
        ->add_option("--format", reward_opt.format,
                     "Default table format for perception records")
        ->check(CLI::IsMember({"html", "markdown"}));

    SplitOptions split_opt;
    CLI::App* split =
        app.add_subcommand("split", "Split stepped solutions into hint-completion pairs");
    split->add_option("--jsonl", split_opt.jsonl_file,
                      "JSONL input: {image, question, steps, answer} per line")
        ->required();
    split->add_option("--pairs", split_opt.pairs, "Pairs per solution (default 3)");
    split->add_option("--seed", split_opt.seed, "RNG seed");

    FilterOptions filter_opt;
    CLI::App* filter =
        app.add_subcommand("filter", "Pixel filter, length filter, then random sampling");
    filter->add_option("--jsonl", filter_opt.jsonl_file, "JSONL dataset records")->required();
    filter->add_option("--max-pixels", filter_opt.cfg.max_pixels,
                       "Keep records with width*height <= this (default 1605632)");
    filter->add_option("--max-tokens", filter_opt.cfg.max_target_tokens,
                       "Keep perception targets with <= this many tokens (default 2048)");
    filter->add_option("--sample", filter_opt.cfg.sample_size, "Sample size target (default 8000)");
    filter->add_option("--seed", filter_opt.cfg.seed, "Sampling seed");

    SimulateOptions sim_opt;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "Train the toy Bernoulli policy and report reward-variance dynamics");
    simulate->add_option("--p-init", sim_opt.p_init_csv, "Initial accuracies, comma separated");
    simulate->add_option("--steps", sim_opt.steps, "Optimization steps per run (default 200)");
    simulate->add_option("--group-size", sim_opt.group_size, "Rollouts per question (default 4)");
    simulate->add_option("--seeds", sim_opt.seeds, "Seeds per p_init (default 1)");
    simulate->add_option("--seed", sim_opt.seed, "Base seed");
    simulate->add_option("--lr", sim_opt.lr, "Learning rate (default 0.05)");
    simulate->add_option("--policy", sim_opt.policy, "Degenerate-group policy: zeroout or skip")
        ->check(CLI::IsMember({"zeroout", "skip"}));

    AdvantagesOptions adv_opt;
    CLI::App* advantages =
        app.add_subcommand("advantages", "Group-relative advantage normalization of raw rewards");
    advantages->add_option("--rewards", adv_opt.rewards_csv, "Inline rewards, comma separated");
    advantages->add_option("--jsonl", adv_opt.jsonl_file, "JSONL batch: {id, rewards} per line");
    advantages->add_option("--policy", adv_opt.policy, "Degenerate-group policy: zeroout or skip")
        ->check(CLI::IsMember({"zeroout", "skip"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(teds)) return run_teds(teds_opt);
        if (app.got_subcommand(reward)) return run_reward(reward_opt);
        if (app.got_subcommand(split)) return run_split(split_opt);
        if (app.got_subcommand(filter)) return run_filter(filter_opt);
        if (app.got_subcommand(simulate)) return run_simulate(sim_opt);
        if (app.got_subcommand(advantages)) return run_advantages(adv_opt);
    } catch (const SchemaError& e) {
        std::cerr << "line " << e.line << ": " << e.what << "\n";
        return kExitUsage;
    } catch (const tablerl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
