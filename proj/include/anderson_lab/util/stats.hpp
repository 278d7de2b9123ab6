#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace anderson_lab::util {

/// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Sample mean, variance and standard error with compensated sums of x and
/// of (x - shift)^2 around the first observation.
class MomentAccumulator {
 public:
  void add(double x);
  [[nodiscard]] long count() const { return n_; }
  [[nodiscard]] double mean() const;
  /// Unbiased sample variance.
  [[nodiscard]] double variance() const;
  [[nodiscard]] double std_error() const;

 private:
  long n_ = 0;
  double shift_ = 0.0;
  CompensatedSum s1_;
  CompensatedSum s2_;
};

[[nodiscard]] double mean(std::span<const double> xs);
[[nodiscard]] double std_error(std::span<const double> xs);

/// Least-squares slope of y against x.
[[nodiscard]] double fitted_slope(std::span<const double> x, std::span<const double> y);

/// One row of an ensemble statistics export.
struct EnsembleStat {
  std::string observable;
  double estimate = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  std::uint64_t seed_base = 0;
};

[[nodiscard]] EnsembleStat summarize(const std::string& observable, std::span<const double> xs,
                                     std::uint64_t seed_base);

/// CSV with header observable,estimate,std_error,n_samples,seed_base.
void write_ensemble_csv(std::ostream& os, const std::vector<EnsembleStat>& rows);

}  // namespace anderson_lab::util
