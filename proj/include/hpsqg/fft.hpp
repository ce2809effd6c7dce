#pragma once

#include <complex>
#include <vector>

namespace hpsqg {

/// Minimal self-contained power-of-two FFT used by the velocity row
/// convolution. Deterministic: fixed butterfly order, no runtime planning.
namespace fft {

using cplx = std::complex<double>;

/// Smallest power of two >= n (n >= 1).
std::size_t next_pow2(std::size_t n);

/// In-place radix-2 FFT. data.size() must be a power of two.
/// inverse=true applies the conjugate transform and the 1/N scaling.
void transform(std::vector<cplx>& data, bool inverse);

/// Forward FFT of a real sequence zero-padded to length n (power of two).
/// Returns the half spectrum: bins 0..n/2 inclusive.
std::vector<cplx> real_forward(const std::vector<double>& x, std::size_t n);

/// Inverse of real_forward: reconstructs the length-n real sequence from
/// a half spectrum of size n/2+1 (Hermitian symmetry assumed).
std::vector<double> real_inverse(const std::vector<cplx>& half, std::size_t n);

} // namespace fft

} // namespace hpsqg
