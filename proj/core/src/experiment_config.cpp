#include "othpo/experiment_config.hpp"

#include <charconv>
#include <fstream>
#include <thread>

#include "othpo/errors.hpp"

namespace othpo {
namespace {

std::uint64_t parse_u64(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ValidationError("invalid seed '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find(sep, start);
    const auto piece = text.substr(
        start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (!piece.empty()) out.push_back(piece);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_range(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  for (const auto part : split(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string_view::npos) {
      seeds.push_back(parse_u64(part));
      continue;
    }
    const auto lo = parse_u64(part.substr(0, dots));
    const auto hi = parse_u64(part.substr(dots + 2));
    if (hi < lo) throw ValidationError("empty seed range '" + std::string(part) + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw ValidationError("no seeds given");
  return seeds;
}

std::vector<Method> parse_method_list(std::string_view text) {
  std::vector<Method> out;
  for (auto part : split(text, ',')) {
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    out.push_back(parse_method(part));
  }
  if (out.empty()) throw ValidationError("no methods given");
  return out;
}

std::shared_ptr<const Benchmark> make_benchmark(
    const nlohmann::json& spec, const std::filesystem::path& base_dir) {
  const auto type = spec.at("type").get<std::string>();
  const auto seed = get_or<std::uint64_t>(spec, "seed", 0);
  if (type == "newsvendor") {
    NewsVendorParams p;
    p.initial_utilities = get_or(spec, "utilities", p.initial_utilities);
    p.price_sensitivity = get_or(spec, "price_sensitivity", p.price_sensitivity);
    p.unit_costs = get_or(spec, "unit_costs", p.unit_costs);
    p.customers_per_period =
        get_or(spec, "customers_per_period", p.customers_per_period);
    p.rw_sigma = get_or(spec, "rw_sigma", p.rw_sigma);
    p.max_price = get_or(spec, "max_price", p.max_price);
    return newsvendor_sequence(seed, get_or(spec, "n_tasks", 9), p);
  }
  if (type == "synthetic_drift") {
    auto sizes = get_or(spec, "sizes", std::vector<double>{});
    const int n_tasks =
        get_or(spec, "n_tasks",
               sizes.empty() ? static_cast<int>(default_dataset_sizes().size())
                             : static_cast<int>(sizes.size()));
    return synthetic_drift(seed, n_tasks, get_or(spec, "dim", 2), std::move(sizes));
  }
  if (type == "tabular") {
    std::filesystem::path path = spec.at("path").get<std::string>();
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    const auto kind = get_or<std::string>(spec, "context_kind", "size");
    if (kind != "size" && kind != "index") {
      throw ValidationError("context_kind must be 'size' or 'index'");
    }
    return TabularBenchmark::load(
        path, space_from_json(spec.at("space")),
        parse_direction(get_or<std::string>(spec, "direction", "minimize")),
        kind == "size" ? ContextKind::kSize : ContextKind::kIndex);
  }
  throw ValidationError("unknown benchmark type '" + type +
                        "' (expected newsvendor, synthetic_drift or tabular)");
}

SchedulerConfig scheduler_config_from_json(const nlohmann::json& j) {
  SchedulerConfig c;
  if (j.is_null()) return c;
  c.n_warm_start = get_or(j, "N", c.n_warm_start);
  c.initial_design = get_or(j, "initial_design", c.initial_design);
  c.acquisition.mc_samples = get_or(j, "mc_samples", c.acquisition.mc_samples);
  c.acquisition.candidate_pool_size =
      get_or(j, "candidate_pool_size", c.acquisition.candidate_pool_size);
  c.acquisition.local_search_steps =
      get_or(j, "local_search_steps", c.acquisition.local_search_steps);
  c.acquisition.local_search_step =
      get_or(j, "local_search_step", c.acquisition.local_search_step);
  c.gp.restarts = get_or(j, "gp_restarts", c.gp.restarts);
  c.gp.max_iterations = get_or(j, "gp_max_iterations", c.gp.max_iterations);
  c.cts_candidate_pool = get_or(j, "cts_candidate_pool", c.cts_candidate_pool);
  c.transfer_obs_cap = get_or(j, "transfer_obs_cap", c.transfer_obs_cap);
  if (c.n_warm_start < 1) throw ValidationError("scheduler.N must be >= 1");
  if (c.acquisition.mc_samples < 1) {
    throw ValidationError("scheduler.mc_samples must be >= 1");
  }
  if (c.initial_design < 0 || c.acquisition.candidate_pool_size < 1 ||
      c.gp.restarts < 1 || c.gp.max_iterations < 1 || c.cts_candidate_pool < 0 ||
      c.transfer_obs_cap < 1) {
    throw ValidationError("scheduler settings out of range");
  }
  return c;
}

nlohmann::json scheduler_config_to_json(const SchedulerConfig& c) {
  return {
      {"N", c.n_warm_start},
      {"initial_design", c.initial_design},
      {"mc_samples", c.acquisition.mc_samples},
      {"candidate_pool_size", c.acquisition.candidate_pool_size},
      {"local_search_steps", c.acquisition.local_search_steps},
      {"local_search_step", c.acquisition.local_search_step},
      {"gp_restarts", c.gp.restarts},
      {"gp_max_iterations", c.gp.max_iterations},
      {"cts_candidate_pool", c.cts_candidate_pool},
      {"transfer_obs_cap", c.transfer_obs_cap},
  };
}

ExperimentPlan plan_from_json(const nlohmann::json& j,
                              const std::filesystem::path& base_dir) {
  try {
    ExperimentPlan plan;
    plan.benchmark = make_benchmark(j.at("benchmark"), base_dir);
    if (j.contains("methods")) {
      for (const auto& m : j.at("methods")) {
        plan.methods.push_back(parse_method(m.get<std::string>()));
      }
    } else {
      plan.methods.assign(all_methods().begin(), all_methods().end());
    }
    plan.budget = get_or(j, "budget", 25);
    if (!j.contains("seeds")) {
      plan.seeds = default_seeds();
    } else if (j.at("seeds").is_string()) {
      plan.seeds = parse_seed_range(j.at("seeds").get<std::string>());
    } else {
      plan.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    }
    plan.scheduler = scheduler_config_from_json(j.value("scheduler", nlohmann::json()));
    const int parallelism = get_or(j, "parallelism", 0);
    plan.parallelism =
        parallelism > 0
            ? parallelism
            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("experiment config: ") + e.what());
  }
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("config '" + path.string() + "': " + e.what());
  }
  return plan_from_json(j, path.parent_path());
}

nlohmann::json example_config() {
  nlohmann::json methods = nlohmann::json::array();
  for (const auto m : all_methods()) methods.push_back(std::string(method_name(m)));
  return {
      {"benchmark",
       {{"type", "newsvendor"},
        {"seed", 0},
        {"n_tasks", 9},
        {"utilities", {10.0, 12.0, 8.0}},
        {"price_sensitivity", 1.0},
        {"unit_costs", {2.0, 3.0, 1.0}},
        {"customers_per_period", 200},
        {"rw_sigma", 1.5},
        {"max_price", 20}}},
      {"methods", methods},
      {"budget", 25},
      {"seeds", "0..49"},
      {"parallelism", 0},
      {"scheduler", scheduler_config_to_json(SchedulerConfig{})},
  };
}

}  // namespace othpo
