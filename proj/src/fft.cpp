#include "chronoclock/fft.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace chronoclock::fft {

bool is_pow2(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

namespace {

struct Tables {
    std::vector<std::complex<double>> twiddle; // exp(-2*pi*i*j/n), j < n/2
    std::vector<std::uint32_t> bitrev;
};

const Tables& tables_for(std::size_t n) {
    thread_local std::unordered_map<std::size_t, Tables> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    Tables t;
    t.twiddle.resize(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>(j) /
                           static_cast<double>(n);
        t.twiddle[j] = {std::cos(ang), std::sin(ang)};
    }
    t.bitrev.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
        t.bitrev[i] = static_cast<std::uint32_t>(r);
    }
    return cache.emplace(n, std::move(t)).first->second;
}

} // namespace

void transform_pow2(std::span<std::complex<double>> a, int sign) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
    if (n == 1) return;

    const Tables& t = tables_for(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = t.bitrev[i];
        if (i < r) std::swap(a[i], a[r]);
    }

    // Butterflies on raw doubles; complex<double> operator* would route
    // through the checked __muldc3 path and dominate the runtime.
    auto* d = reinterpret_cast<double*>(a.data());
    const auto* tw = reinterpret_cast<const double*>(t.twiddle.data());
    const double ws = sign > 0 ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t stride = n / len;
        for (std::size_t base = 0; base < n; base += len) {
            std::size_t k = 0;
            for (std::size_t j = 0; j < half; ++j, k += stride) {
                const double wr = tw[2 * k];
                const double wi = ws * tw[2 * k + 1];
                const std::size_t i0 = 2 * (base + j);
                const std::size_t i1 = 2 * (base + j + half);
                const double xr = d[i1] * wr - d[i1 + 1] * wi;
                const double xi = d[i1] * wi + d[i1 + 1] * wr;
                d[i1] = d[i0] - xr;
                d[i1 + 1] = d[i0 + 1] - xi;
                d[i0] += xr;
                d[i0 + 1] += xi;
            }
        }
    }
}

} // namespace chronoclock::fft
