#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "othpo/benchmarks.hpp"
#include "othpo/harness.hpp"

namespace othpo {

// Parses "a..b" (inclusive), "a,b,c", or a mix such as "0..3,7".
std::vector<std::uint64_t> parse_seed_range(std::string_view text);

// Parses a comma-separated method list; throws listing valid names.
std::vector<Method> parse_method_list(std::string_view text);

// Benchmark definition: {"type": "newsvendor" | "synthetic_drift" |
// "tabular", "seed": ..., parameters...}. Relative tabular paths resolve
// against `base_dir`.
std::shared_ptr<const Benchmark> make_benchmark(
    const nlohmann::json& spec, const std::filesystem::path& base_dir = {});

SchedulerConfig scheduler_config_from_json(const nlohmann::json& j);
nlohmann::json scheduler_config_to_json(const SchedulerConfig& config);

// Full plan from an experiment config file. Throws ValidationError.
ExperimentPlan plan_from_json(const nlohmann::json& j,
                              const std::filesystem::path& base_dir = {});
ExperimentPlan load_plan(const std::filesystem::path& path);

nlohmann::json example_config();

}  // namespace othpo
