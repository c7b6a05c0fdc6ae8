#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "othpo/rng.hpp"

namespace othpo {

enum class DimensionKind { kContinuous, kInteger };
enum class Scaling { kLinear, kLogarithmic };

struct Dimension {
  std::string name;
  DimensionKind kind = DimensionKind::kContinuous;
  double lower = 0.0;
  double upper = 1.0;
  Scaling scaling = Scaling::kLinear;

  bool is_integer() const { return kind == DimensionKind::kInteger; }
  bool is_log() const { return scaling == Scaling::kLogarithmic; }
  // A collapsed dimension (lower == upper) only arises from restrict().
  bool is_fixed() const { return lower == upper; }

  bool operator==(const Dimension&) const = default;
};

// Native hyperparameter values, one per dimension of the owning space.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<double> values)
      : values_(std::move(values)) {}

  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  bool operator==(const Configuration&) const = default;

 private:
  std::vector<double> values_;
};

// Immutable, ordered list of dimensions. Numeric code works in the unit cube
// [0,1]^d obtained via encode(); logarithmic dimensions are encoded in log
// space.
class SearchSpace {
 public:
  SearchSpace() = default;
  explicit SearchSpace(std::vector<Dimension> dimensions);

  std::span<const Dimension> dimensions() const { return dims_; }
  const Dimension& dimension(std::size_t i) const { return dims_[i]; }
  std::size_t size() const { return dims_.size(); }
  // Index of the named dimension, or throws ValidationError.
  std::size_t index_of(const std::string& name) const;

  // Throws ValidationError naming the dimension on bound or integrality
  // violations.
  void validate(const Configuration& config) const;

  Eigen::VectorXd encode(const Configuration& config) const;
  Configuration decode(const Eigen::Ref<const Eigen::VectorXd>& point) const;
  Configuration sample_uniform(Rng& rng) const;
  // Intersected bounds; never enlarges a dimension.
  SearchSpace restrict(std::span<const double> lows,
                       std::span<const double> highs) const;

  bool operator==(const SearchSpace&) const = default;

 private:
  std::vector<Dimension> dims_;
};

void to_json(nlohmann::json& j, const Dimension& d);
void from_json(const nlohmann::json& j, Dimension& d);
nlohmann::json space_to_json(const SearchSpace& space);
SearchSpace space_from_json(const nlohmann::json& j);

}  // namespace othpo
