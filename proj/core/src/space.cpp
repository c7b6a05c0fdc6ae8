#include "othpo/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "othpo/errors.hpp"

namespace othpo {
namespace {

double round_half_up(double x) { return std::floor(x + 0.5); }

void check_dimension(const Dimension& d) {
  if (d.name.empty()) throw ValidationError("dimension with empty name");
  if (!std::isfinite(d.lower) || !std::isfinite(d.upper) || d.lower > d.upper) {
    throw ValidationError("dimension '" + d.name + "': requires lower < upper");
  }
  if (d.is_log() && d.lower <= 0.0) {
    throw ValidationError("dimension '" + d.name +
                          "': logarithmic scaling requires lower > 0");
  }
  if (d.is_integer() &&
      (d.lower != std::round(d.lower) || d.upper != std::round(d.upper))) {
    throw ValidationError("dimension '" + d.name +
                          "': integer bounds must be integral");
  }
}

double to_unit(const Dimension& d, double v) {
  if (d.is_fixed()) return 0.0;
  if (d.is_log()) {
    return (std::log(v) - std::log(d.lower)) /
           (std::log(d.upper) - std::log(d.lower));
  }
  return (v - d.lower) / (d.upper - d.lower);
}

double from_unit(const Dimension& d, double u) {
  if (d.is_fixed()) return d.lower;
  double v;
  if (d.is_log()) {
    const double lo = std::log(d.lower);
    v = std::exp(lo + u * (std::log(d.upper) - lo));
  } else {
    v = d.lower + u * (d.upper - d.lower);
  }
  if (d.is_integer()) v = round_half_up(v);
  return std::clamp(v, d.lower, d.upper);
}

}  // namespace

SearchSpace::SearchSpace(std::vector<Dimension> dimensions)
    : dims_(std::move(dimensions)) {
  std::set<std::string> names;
  for (auto& d : dims_) {
    // Only restrict() may produce collapsed dimensions; construction from
    // user input requires a proper interval.
    if (d.lower == d.upper) {
      throw ValidationError("dimension '" + d.name +
                            "': requires lower < upper");
    }
    check_dimension(d);
    if (!names.insert(d.name).second) {
      throw ValidationError("duplicate dimension name '" + d.name + "'");
    }
  }
}

std::size_t SearchSpace::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i].name == name) return i;
  }
  throw ValidationError("unknown dimension '" + name + "'");
}

void SearchSpace::validate(const Configuration& config) const {
  if (config.size() != dims_.size()) {
    throw ValidationError("configuration has " + std::to_string(config.size()) +
                          " values, space has " +
                          std::to_string(dims_.size()) + " dimensions");
  }
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const auto& d = dims_[i];
    const double v = config[i];
    if (!(v >= d.lower && v <= d.upper)) {
      throw ValidationError("dimension '" + d.name + "': value " +
                            std::to_string(v) + " outside [" +
                            std::to_string(d.lower) + ", " +
                            std::to_string(d.upper) + "]");
    }
    if (d.is_integer() && v != std::round(v)) {
      throw ValidationError("dimension '" + d.name +
                            "': integer dimension holds non-integer " +
                            std::to_string(v));
    }
  }
}

Eigen::VectorXd SearchSpace::encode(const Configuration& config) const {
  validate(config);
  Eigen::VectorXd out(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] =
        std::clamp(to_unit(dims_[i], config[i]), 0.0, 1.0);
  }
  return out;
}

Configuration SearchSpace::decode(
    const Eigen::Ref<const Eigen::VectorXd>& point) const {
  if (static_cast<std::size_t>(point.size()) != dims_.size()) {
    throw ValidationError("point dimensionality does not match space");
  }
  std::vector<double> values(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const double u = point[static_cast<Eigen::Index>(i)];
    if (!(u >= 0.0 && u <= 1.0)) {
      throw ValidationError("dimension '" + dims_[i].name + "': coordinate " +
                            std::to_string(u) + " outside [0, 1]");
    }
    values[i] = from_unit(dims_[i], u);
  }
  return Configuration(std::move(values));
}

Configuration SearchSpace::sample_uniform(Rng& rng) const {
  Eigen::VectorXd u(dims_.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = uniform01(rng);
  return decode(u);
}

SearchSpace SearchSpace::restrict(std::span<const double> lows,
                                  std::span<const double> highs) const {
  if (lows.size() != dims_.size() || highs.size() != dims_.size()) {
    throw ValidationError("restrict: bound vectors do not match space");
  }
  SearchSpace out;
  out.dims_ = dims_;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    auto& d = out.dims_[i];
    double lo = lows[i];
    double hi = highs[i];
    if (!(lo <= hi)) {
      throw ValidationError("restrict: dimension '" + d.name +
                            "' has low > high");
    }
    if (d.is_integer()) {
      lo = round_half_up(lo);
      hi = round_half_up(hi);
    }
    if (lo < dims_[i].lower || hi > dims_[i].upper) {
      throw ValidationError("restrict: dimension '" + d.name +
                            "' bounds exceed the original interval");
    }
    d.lower = lo;
    d.upper = hi;
  }
  return out;
}

void to_json(nlohmann::json& j, const Dimension& d) {
  j = nlohmann::json{
      {"name", d.name},
      {"kind", d.is_integer() ? "integer" : "continuous"},
      {"lower", d.lower},
      {"upper", d.upper},
      {"scaling", d.is_log() ? "logarithmic" : "linear"},
  };
}

void from_json(const nlohmann::json& j, Dimension& d) {
  d.name = j.at("name").get<std::string>();
  const auto kind = j.value("kind", std::string("continuous"));
  if (kind == "integer" || kind == "int") {
    d.kind = DimensionKind::kInteger;
  } else if (kind == "continuous" || kind == "float") {
    d.kind = DimensionKind::kContinuous;
  } else {
    throw ValidationError("dimension '" + d.name + "': unknown kind '" + kind +
                          "'");
  }
  d.lower = j.at("lower").get<double>();
  d.upper = j.at("upper").get<double>();
  const auto scaling = j.value("scaling", std::string("linear"));
  if (scaling == "logarithmic" || scaling == "log") {
    d.scaling = Scaling::kLogarithmic;
  } else if (scaling == "linear") {
    d.scaling = Scaling::kLinear;
  } else {
    throw ValidationError("dimension '" + d.name + "': unknown scaling '" +
                          scaling + "'");
  }
}

nlohmann::json space_to_json(const SearchSpace& space) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& d : space.dimensions()) out.push_back(d);
  return out;
}

SearchSpace space_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("search space must be a list");
  return SearchSpace(j.get<std::vector<Dimension>>());
}

}  // namespace othpo
