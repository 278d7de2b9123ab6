#pragma once

#include <complex>
#include <span>
#include <vector>

namespace anderson_lab::spectral::fft {

/// In-place 2-D synthesis: values(x) = sum_k coeffs(k) e^{2 pi i k.x} on an
/// n x n grid. Plans are cached per size and created with FFTW_ESTIMATE so
/// results do not depend on timing.
void synthesize(int n, std::span<std::complex<double>> data);

/// In-place 2-D analysis, normalized so that analysis inverts synthesis.
void analyze(int n, std::span<std::complex<double>> data);

}  // namespace anderson_lab::spectral::fft
