#include "hpsqg/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace hpsqg {
namespace fft {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void transform(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft::transform: size must be a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double s = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= s;
    }
}

std::vector<cplx> real_forward(const std::vector<double>& x, std::size_t n) {
    if (x.size() > n)
        throw std::invalid_argument("fft::real_forward: input longer than transform size");
    std::vector<cplx> buf(n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) buf[i] = cplx(x[i], 0.0);
    transform(buf, false);
    buf.resize(n / 2 + 1);
    return buf;
}

std::vector<double> real_inverse(const std::vector<cplx>& half, std::size_t n) {
    if (half.size() != n / 2 + 1)
        throw std::invalid_argument("fft::real_inverse: half spectrum size mismatch");
    std::vector<cplx> buf(n);
    for (std::size_t i = 0; i <= n / 2; ++i) buf[i] = half[i];
    for (std::size_t i = n / 2 + 1; i < n; ++i) buf[i] = std::conj(half[n - i]);
    transform(buf, true);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = buf[i].real();
    return out;
}

} // namespace fft
} // namespace hpsqg
