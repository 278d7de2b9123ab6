#include "anderson_lab/util/stats.hpp"

#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace anderson_lab::util {

void MomentAccumulator::add(double x) {
  if (n_ == 0) shift_ = x;
  ++n_;
  const double d = x - shift_;
  s1_.add(d);
  s2_.add(d * d);
}

double MomentAccumulator::mean() const { return n_ > 0 ? shift_ + s1_.value() / n_ : 0.0; }

double MomentAccumulator::variance() const {
  if (n_ < 2) return 0.0;
  const double m = s1_.value() / n_;
  return std::max(0.0, (s2_.value() - n_ * m * m) / (n_ - 1));
}

double MomentAccumulator::std_error() const { return n_ > 0 ? std::sqrt(variance() / n_) : 0.0; }

double mean(std::span<const double> xs) {
  MomentAccumulator acc;
  for (double x : xs) acc.add(x);
  return acc.mean();
}

double std_error(std::span<const double> xs) {
  MomentAccumulator acc;
  for (double x : xs) acc.add(x);
  return acc.std_error();
}

double fitted_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fitted_slope: need two or more points");
  const double mx = mean(x), my = mean(y);
  CompensatedSum sxy, sxx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy.add((x[i] - mx) * (y[i] - my));
    sxx.add((x[i] - mx) * (x[i] - mx));
  }
  return sxy.value() / sxx.value();
}

EnsembleStat summarize(const std::string& observable, std::span<const double> xs, std::uint64_t seed_base) {
  MomentAccumulator acc;
  for (double x : xs) acc.add(x);
  return {observable, acc.mean(), acc.std_error(), acc.count(), seed_base};
}

void write_ensemble_csv(std::ostream& os, const std::vector<EnsembleStat>& rows) {
  os << "observable,estimate,std_error,n_samples,seed_base\n" << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.observable << ',' << r.estimate << ',' << r.std_error << ',' << r.n_samples << ',' << r.seed_base
       << '\n';
  }
}

}  // namespace anderson_lab::util
