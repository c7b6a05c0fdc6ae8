#include "othpo/benchmarks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "othpo/errors.hpp"

namespace othpo {

std::string_view direction_name(Direction d) {
  return d == Direction::kMaximize ? "maximize" : "minimize";
}

Direction parse_direction(std::string_view name) {
  if (name == "maximize") return Direction::kMaximize;
  if (name == "minimize") return Direction::kMinimize;
  throw ValidationError("unknown direction '" + std::string(name) +
                        "' (expected minimize or maximize)");
}

ContextScale Benchmark::context_scale() const {
  ContextScale scale;
  scale.kind = context_kind();
  scale.n_tasks = n_tasks();
  const auto t = tasks();
  if (!t.empty()) {
    scale.min_feature = t.front().feature;
    scale.max_feature = t.back().feature;
    for (const auto& c : t) {
      scale.min_feature = std::min(scale.min_feature, c.feature);
      scale.max_feature = std::max(scale.max_feature, c.feature);
    }
  }
  return scale;
}

// --- NewsVendor ------------------------------------------------------------

namespace {

void check_prices(const NewsVendorState& state, const Configuration& prices) {
  if (prices.size() != state.utilities.size()) {
    throw ValidationError("newsvendor: expected " +
                          std::to_string(state.utilities.size()) + " prices");
  }
  for (std::size_t c = 0; c < prices.size(); ++c) {
    if (!std::isfinite(prices[c]) || prices[c] < 0.0 ||
        prices[c] > state.max_price) {
      throw ValidationError("newsvendor: price " + std::to_string(c) +
                            " out of range");
    }
  }
}

double gumbel(Rng& rng) {
  // U in (0,1]: -log(-log U) with U = 1 - uniform01 avoids log(0).
  const double u = 1.0 - uniform01(rng);
  return -std::log(-std::log(u));
}

}  // namespace

double newsvendor_profit(const NewsVendorState& state,
                         const Configuration& prices, Rng& noise_rng) {
  check_prices(state, prices);
  const std::size_t n = state.utilities.size();
  double profit = 0.0;
  for (int customer = 0; customer < state.customers_per_period; ++customer) {
    double best = gumbel(noise_rng);  // no purchase
    std::size_t choice = n;
    for (std::size_t c = 0; c < n; ++c) {
      const double v = state.utilities[c] -
                       state.price_sensitivity * prices[c] + gumbel(noise_rng);
      if (v > best) {
        best = v;
        choice = c;
      }
    }
    if (choice < n) profit += prices[choice] - state.unit_costs[choice];
  }
  return profit;
}

double newsvendor_expected_profit(const NewsVendorState& state,
                                  const Configuration& prices) {
  check_prices(state, prices);
  const std::size_t n = state.utilities.size();
  std::vector<double> v(n);
  double vmax = 0.0;  // no-purchase utility
  for (std::size_t c = 0; c < n; ++c) {
    v[c] = state.utilities[c] - state.price_sensitivity * prices[c];
    vmax = std::max(vmax, v[c]);
  }
  double denom = std::exp(-vmax);
  for (std::size_t c = 0; c < n; ++c) denom += std::exp(v[c] - vmax);
  double margin = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    margin += (prices[c] - state.unit_costs[c]) * std::exp(v[c] - vmax) / denom;
  }
  return state.customers_per_period * margin;
}

NewsVendorBenchmark::NewsVendorBenchmark(std::uint64_t seed, int n_tasks,
                                         const NewsVendorParams& params) {
  if (n_tasks < 1) throw ValidationError("newsvendor: n_tasks must be >= 1");
  const std::size_t n = params.initial_utilities.size();
  if (n == 0 || params.unit_costs.size() != n) {
    throw ValidationError(
        "newsvendor: utilities and unit costs must have equal, non-zero size");
  }
  if (params.customers_per_period < 1) {
    throw ValidationError("newsvendor: customers_per_period must be >= 1");
  }
  if (!(params.price_sensitivity > 0.0) || params.rw_sigma < 0.0) {
    throw ValidationError(
        "newsvendor: price_sensitivity must be > 0 and rw_sigma >= 0");
  }
  std::vector<Dimension> dims;
  for (std::size_t c = 0; c < n; ++c) {
    dims.push_back({"price_" + std::to_string(c), DimensionKind::kInteger, 0.0,
                    params.max_price, Scaling::kLinear});
  }
  space_ = SearchSpace(std::move(dims));

  Rng walk(derive_seed(seed, 0, 0, Stream::kBenchmark));
  NewsVendorState s{params.initial_utilities, params.price_sensitivity,
                    params.customers_per_period, params.unit_costs,
                    params.rw_sigma, params.max_price};
  for (int t = 1; t <= n_tasks; ++t) {
    if (t > 1) {
      for (auto& u : s.utilities) u += params.rw_sigma * standard_normal(walk);
    }
    states_.push_back(s);
    tasks_.push_back({t, static_cast<double>(t)});
  }
}

const NewsVendorState& NewsVendorBenchmark::state(int task_index) const {
  if (task_index < 1 || task_index > n_tasks()) {
    throw ValidationError("newsvendor: unknown task " +
                          std::to_string(task_index));
  }
  return states_[static_cast<std::size_t>(task_index - 1)];
}

double NewsVendorBenchmark::evaluate(int task_index, const Configuration& config,
                                     std::uint64_t noise_seed) const {
  space_.validate(config);
  Rng noise(noise_seed);
  return newsvendor_profit(state(task_index), config, noise);
}

std::unique_ptr<Benchmark> newsvendor_sequence(std::uint64_t seed, int n_tasks,
                                               const NewsVendorParams& params) {
  return std::make_unique<NewsVendorBenchmark>(seed, n_tasks, params);
}

// --- synthetic drift --------------------------------------------------------

std::span<const double> default_dataset_sizes() {
  static constexpr std::array<double, 28> kSizes = {
      56,    72,    93,    120,   155,   201,   259,   335,   433,   560,
      723,   934,   1206,  1558,  2012,  2599,  3357,  4335,  5600,  7232,
      9341,  12064, 15582, 20125, 25992, 33571, 43358, 56000};
  return kSizes;
}

SyntheticDriftBenchmark::SyntheticDriftBenchmark(std::uint64_t seed, int dim,
                                                 std::vector<double> sizes) {
  if (dim < 1) throw ValidationError("synthetic_drift: dim must be >= 1");
  if (sizes.empty()) throw ValidationError("synthetic_drift: no sizes");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sizes[i] > 0.0) || (i > 0 && !(sizes[i] > sizes[i - 1]))) {
      throw ValidationError(
          "synthetic_drift: sizes must be positive and strictly increasing");
    }
  }
  std::vector<Dimension> dims;
  for (int d = 0; d < dim; ++d) {
    dims.push_back({"x" + std::to_string(d), DimensionKind::kContinuous, 0.0,
                    1.0, Scaling::kLinear});
  }
  space_ = SearchSpace(std::move(dims));
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    tasks_.push_back({static_cast<int>(i + 1), sizes[i]});
  }

  Rng rng(derive_seed(seed, 0, 0, Stream::kBenchmark));
  mu_start_.resize(dim);
  mu_end_.resize(dim);
  weights_.resize(dim);
  for (int d = 0; d < dim; ++d) mu_start_[d] = uniform01(rng);
  for (int d = 0; d < dim; ++d) mu_end_[d] = uniform01(rng);
  for (int d = 0; d < dim; ++d) weights_[d] = 0.5 + uniform01(rng);
}

Eigen::VectorXd SyntheticDriftBenchmark::optimum(int task_index) const {
  if (task_index < 1 || task_index > n_tasks()) {
    throw ValidationError("synthetic_drift: unknown task " +
                          std::to_string(task_index));
  }
  const double s_min = tasks_.front().feature;
  const double s_max = tasks_.back().feature;
  const double s = tasks_[static_cast<std::size_t>(task_index - 1)].feature;
  const double frac =
      s_max > s_min ? (std::log(s) - std::log(s_min)) /
                          (std::log(s_max) - std::log(s_min))
                    : 0.0;
  return (mu_start_ + frac * (mu_end_ - mu_start_)).cwiseMax(0.0).cwiseMin(1.0);
}

double SyntheticDriftBenchmark::noise_free(int task_index,
                                           const Configuration& config) const {
  space_.validate(config);
  const Eigen::VectorXd mu = optimum(task_index);
  double f = 0.0;
  for (Eigen::Index d = 0; d < mu.size(); ++d) {
    const double diff = config[static_cast<std::size_t>(d)] - mu[d];
    f += weights_[d] * diff * diff;
  }
  return f;
}

double SyntheticDriftBenchmark::noise_stddev(int task_index) const {
  const double s_min = tasks_.front().feature;
  const double s = tasks_.at(static_cast<std::size_t>(task_index - 1)).feature;
  return 0.01 * (1.0 + s_min / s);
}

double SyntheticDriftBenchmark::evaluate(int task_index,
                                         const Configuration& config,
                                         std::uint64_t noise_seed) const {
  Rng noise(noise_seed);
  return noise_free(task_index, config) +
         noise_stddev(task_index) * standard_normal(noise);
}

std::unique_ptr<Benchmark> synthetic_drift(std::uint64_t seed, int n_tasks,
                                           int dim, std::vector<double> sizes) {
  if (sizes.empty()) {
    const auto defaults = default_dataset_sizes();
    if (n_tasks < 1 || n_tasks > static_cast<int>(defaults.size())) {
      throw ValidationError("synthetic_drift: n_tasks must be in [1, 28] "
                            "when sizes are not given");
    }
    sizes.assign(defaults.begin(), defaults.begin() + n_tasks);
  } else if (static_cast<int>(sizes.size()) != n_tasks) {
    throw ValidationError("synthetic_drift: n_tasks must equal |sizes|");
  }
  return std::make_unique<SyntheticDriftBenchmark>(seed, dim, std::move(sizes));
}

// --- tabular ----------------------------------------------------------------

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& field, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size() || !std::isfinite(v)) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ParseError("not a finite number: '" + field + "'", line);
  }
}

}  // namespace

std::unique_ptr<TabularBenchmark> TabularBenchmark::load(
    const std::filesystem::path& path, SearchSpace space, Direction direction,
    ContextKind kind) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'", 0);
  return parse(in, std::move(space), direction, kind, path.stem().string());
}

std::unique_ptr<TabularBenchmark> TabularBenchmark::parse(
    std::istream& in, SearchSpace space, Direction direction, ContextKind kind,
    std::string name) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) header = split_csv(line);
  }
  if (header.empty()) throw ParseError("missing header row", line_no + 1);
  const std::size_t header_line = line_no;

  const auto column = [&](const std::string& col) {
    const auto it = std::find(header.begin(), header.end(), col);
    if (it == header.end()) {
      throw ParseError("missing column '" + col + "'", header_line);
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  std::vector<std::size_t> dim_cols;
  for (const auto& d : space.dimensions()) dim_cols.push_back(column(d.name));
  const std::size_t context_col = column("context");
  const std::size_t objective_col = column("objective");

  std::map<double, std::vector<std::pair<Eigen::VectorXd, double>>> by_context;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) +
                           " fields, found " + std::to_string(fields.size()),
                       line_no);
    }
    std::vector<double> values;
    for (const auto c : dim_cols) values.push_back(parse_number(fields[c], line_no));
    const double context = parse_number(fields[context_col], line_no);
    const double objective = parse_number(fields[objective_col], line_no);
    Eigen::VectorXd encoded;
    try {
      encoded = space.encode(Configuration(std::move(values)));
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
    if (kind == ContextKind::kSize && !(context > 0.0)) {
      throw ParseError("size contexts must be positive", line_no);
    }
    by_context[context].emplace_back(std::move(encoded), objective);
  }
  if (by_context.empty()) throw ParseError("no data rows", line_no + 1);

  std::unique_ptr<TabularBenchmark> out(new TabularBenchmark());
  out->name_ = std::move(name);
  out->space_ = std::move(space);
  out->direction_ = direction;
  out->kind_ = kind;
  const auto dim = static_cast<Eigen::Index>(out->space_.size());
  int index = 1;
  for (auto& [context, rows] : by_context) {
    Table table;
    table.context = context;
    table.encoded.resize(static_cast<Eigen::Index>(rows.size()), dim);
    table.objectives.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      table.encoded.row(static_cast<Eigen::Index>(r)) = rows[r].first.transpose();
      table.objectives[static_cast<Eigen::Index>(r)] = rows[r].second;
    }
    out->tables_.push_back(std::move(table));
    out->tasks_.push_back(
        {index, kind == ContextKind::kSize ? context : static_cast<double>(index)});
    ++index;
  }
  return out;
}

double TabularBenchmark::evaluate(int task_index, const Configuration& config,
                                  std::uint64_t /*noise_seed*/) const {
  if (task_index < 1 || task_index > n_tasks()) {
    throw ValidationError("tabular: unknown task " + std::to_string(task_index));
  }
  return evaluate_context(tables_[static_cast<std::size_t>(task_index - 1)].context,
                          config);
}

double TabularBenchmark::evaluate_context(double context,
                                          const Configuration& config) const {
  const auto it = std::find_if(tables_.begin(), tables_.end(),
                               [&](const Table& t) { return t.context == context; });
  if (it == tables_.end()) {
    throw ValidationError("tabular: unknown context " + std::to_string(context));
  }
  const Eigen::VectorXd q = space_.encode(config);
  Eigen::Index best = 0;
  (it->encoded.rowwise() - q.transpose()).rowwise().squaredNorm().minCoeff(&best);
  return it->objectives[best];
}

}  // namespace othpo
