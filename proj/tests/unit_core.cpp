#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "hpsqg/fft.hpp"
#include "hpsqg/fit.hpp"
#include "hpsqg/quad1d.hpp"

using namespace hpsqg;

TEST_CASE("fft matches a naive DFT") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const std::size_t n = 64;
    std::vector<fft::cplx> a(n);
    for (auto& z : a) z = {uni(rng), uni(rng)};
    auto b = a;
    fft::transform(b, false);
    for (std::size_t k = 0; k < n; k += 7) {
        fft::cplx ref(0, 0);
        for (std::size_t j = 0; j < n; ++j)
            ref += a[j] * std::polar(1.0, -2.0 * M_PI * double(k * j) / double(n));
        CHECK(std::abs(b[k] - ref) < 1e-10);
    }
    fft::transform(b, true);
    for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(b[j] - a[j]) < 1e-12);
}

TEST_CASE("real fft round trip and linear convolution layout") {
    std::vector<double> x = {1.0, -2.0, 3.0, 0.5};
    const std::size_t L = 16;
    auto half = fft::real_forward(x, L);
    auto back = fft::real_inverse(half, L);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-13));
    for (std::size_t i = x.size(); i < L; ++i) CHECK(std::abs(back[i]) < 1e-13);

    // spectral product equals direct convolution
    std::vector<double> k = {0.5, 1.0, -1.0, 2.0, 0.25};
    auto kh = fft::real_forward(k, L);
    for (std::size_t b = 0; b < kh.size(); ++b) kh[b] *= half[b];
    auto conv = fft::real_inverse(kh, L);
    for (std::size_t p = 0; p < x.size() + k.size() - 1; ++p) {
        double ref = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n)
            if (p >= n && p - n < k.size()) ref += k[p - n] * x[n];
        CHECK(conv[p] == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("adaptive quadrature on known integrals") {
    CHECK(quad1d::adaptive([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12) ==
          doctest::Approx(2.0).epsilon(1e-12));
    // endpoint singularity x^(-1/2): exact 2
    CHECK(quad1d::adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-9) ==
          doctest::Approx(2.0).epsilon(1e-6));
    CHECK(quad1d::gauss([](double x) { return x * x * x + x; }, -1.0, 3.0, 16) ==
          doctest::Approx(24.0).epsilon(1e-13));
}

TEST_CASE("line fit recovers exact slopes") {
    std::vector<double> x = {1, 2, 3, 4, 5}, y;
    for (double v : x) y.push_back(3.5 - 2.0 * v);
    const LineFit f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-13));
    CHECK(f.intercept == doctest::Approx(3.5).epsilon(1e-13));
    CHECK(f.residual_rms < 1e-13);

    std::vector<double> lx = {0.5, 1.0, 2.0, 4.0}, ly;
    for (double v : lx) ly.push_back(2.0 * std::pow(v, -0.75));
    CHECK(fit_loglog(lx, ly).slope == doctest::Approx(-0.75).epsilon(1e-12));
}
