#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "acfinf/error.hpp"

namespace acfinf {

// A finite, non-empty real-valued series X_1..X_n. NaN and Inf are rejected
// at construction so that nothing downstream has to re-check.
class TimeSeries {
public:
  explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InvalidSeries("TimeSeries: series must contain at least one value");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]))
        throw InvalidSeries("TimeSeries: non-finite value at index " + std::to_string(i));
    }
  }

  TimeSeries(std::initializer_list<double> values) : TimeSeries(std::vector<double>(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  double mean() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v;
    return s / static_cast<double>(values_.size());
  }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
  std::vector<double> values_;
};

}  // namespace acfinf
