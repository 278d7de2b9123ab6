#include "anderson_lab/spectral/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace anderson_lab::spectral::fft {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// fftw planning is not thread-safe; execution with the new-array interface is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  // Planning with FFTW_ESTIMATE does not touch the arrays; alignment matches
  // std::vector allocations because fftw_malloc is also used below.
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n * n));
  PlanPair p;
  p.forward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.backward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  if (p.forward == nullptr || p.backward == nullptr) {
    throw std::runtime_error("fftw planning failed");
  }
  return cache.emplace(n, p).first->second;
}

void check(int n, std::span<std::complex<double>> data) {
  if (data.size() != static_cast<std::size_t>(n) * n) {
    throw std::invalid_argument("fft: buffer size does not match grid");
  }
}

}  // namespace

void synthesize(int n, std::span<std::complex<double>> data) {
  check(n, data);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_for(n).backward, p, p);
}

void analyze(int n, std::span<std::complex<double>> data) {
  check(n, data);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_for(n).forward, p, p);
  const double scale = 1.0 / (static_cast<double>(n) * n);
  for (auto& c : data) c *= scale;
}

}  // namespace anderson_lab::spectral::fft
