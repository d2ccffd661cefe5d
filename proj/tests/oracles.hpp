// Test-only oracles: independent quadratures, finite differences, samplers,
// and closed forms used to pin expected values. Nothing here may call the
// implementation paths it is used to check.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracles {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

/// Composite Simpson rule (n panels, n even).
template <typename F>
auto simpson(F&& f, double a, double b, std::size_t n) {
    if (n % 2 == 1) ++n;
    const double h = (b - a) / static_cast<double>(n);
    auto acc = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i)
        acc += f(a + static_cast<double>(i) * h) * ((i % 2 == 1) ? 4.0 : 2.0);
    return acc * (h / 3.0);
}

/// Oscillatory line integral with a Gaussian damper centered at z_center:
/// evaluates at eta0, eta0/2, eta0/4 and Richardson-extrapolates eta -> 0.
template <typename F>
cplx damped_fresnel(F&& f, double z_center, double z_half, double eta0, std::size_t n) {
    auto eval = [&](double eta) {
        auto g = [&](double z) {
            const double d = z - z_center;
            return f(z) * std::exp(-eta * d * d);
        };
        return simpson(g, z_center - z_half, z_center + z_half, n);
    };
    const cplx f0 = eval(eta0), f1 = eval(eta0 / 2), f2 = eval(eta0 / 4);
    const cplx r01 = 2.0 * f1 - f0;
    const cplx r12 = 2.0 * f2 - f1;
    return r12 + (r12 - r01) / 3.0;
}

/// Semi-infinite oscillatory time integral with exponential damping
/// e^{-eta t}, Richardson-extrapolated over eta0, eta0/2, eta0/4.
template <typename F>
cplx damped_time_integral(F&& f, double t_max, double eta0, std::size_t n) {
    auto eval = [&](double eta) {
        auto g = [&](double t) { return f(t) * std::exp(-eta * t); };
        return simpson(g, 0.0, t_max, n);
    };
    const cplx f0 = eval(eta0), f1 = eval(eta0 / 2), f2 = eval(eta0 / 4);
    const cplx r01 = 2.0 * f1 - f0;
    const cplx r12 = 2.0 * f2 - f1;
    return r12 + (r12 - r01) / 3.0;
}

/// Richardson-extrapolated central difference (two levels).
template <typename F>
auto central_derivative(F&& f, double x, double h) {
    const auto d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    const auto d2 = (f(x + h / 2) - f(x - h / 2)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

/// Deterministic uniform in [0,1) from the raw engine (bypasses the
/// library's unspecified distribution implementations).
inline double uniform01(std::mt19937_64& rng) {
    return std::ldexp(static_cast<double>(rng() >> 11), -53);
}

/// Box-Muller normal sampler, deterministic across platforms.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}
    double operator()(double mean, double sigma) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + sigma * spare_;
        }
        double u1 = uniform01(rng_);
        while (u1 <= 0.0) u1 = uniform01(rng_);
        const double u2 = uniform01(rng_);
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        have_spare_ = true;
        return mean + sigma * r * std::cos(2.0 * kPi * u2);
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Histogram on a uniform lattice, normalized to a density.
inline std::vector<double> density_histogram(const std::vector<double>& samples, double x0,
                                             double dx, std::size_t n_bins) {
    std::vector<double> h(n_bins, 0.0);
    std::size_t kept = 0;
    for (double s : samples) {
        const double u = (s - x0) / dx;
        if (u < 0.0) continue;
        const auto b = static_cast<std::size_t>(u);
        if (b >= n_bins) continue;
        h[b] += 1.0;
        ++kept;
    }
    if (kept == 0) throw std::runtime_error("density_histogram: no samples in range");
    const double norm = 1.0 / (static_cast<double>(samples.size()) * dx);
    for (double& v : h) v *= norm;
    return h;
}

/// Gaussian kernel smoothing on a uniform lattice (same lattice out).
inline std::vector<double> gaussian_smooth(const std::vector<double>& f, double dx,
                                           double bandwidth) {
    const auto n = f.size();
    const auto w = static_cast<std::ptrdiff_t>(std::ceil(4.0 * bandwidth / dx));
    std::vector<double> kernel(static_cast<std::size_t>(2 * w + 1));
    double ksum = 0.0;
    for (std::ptrdiff_t i = -w; i <= w; ++i) {
        const double u = static_cast<double>(i) * dx / bandwidth;
        kernel[static_cast<std::size_t>(i + w)] = std::exp(-0.5 * u * u);
        ksum += kernel[static_cast<std::size_t>(i + w)];
    }
    for (double& k : kernel) k /= ksum;
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::ptrdiff_t j = -w; j <= w; ++j) {
            const auto src = static_cast<std::ptrdiff_t>(i) + j;
            if (src < 0 || src >= static_cast<std::ptrdiff_t>(n)) continue;
            out[i] += f[static_cast<std::size_t>(src)] * kernel[static_cast<std::size_t>(j + w)];
        }
    return out;
}

/// Plane-wave reflection probability off the step V theta(x) for a particle
/// leaving the region with kinetic energy p^2/2m (drop of height V).
inline double step_reflection_probability(double p, double V, double m) {
    const double k = std::abs(p);
    const double kp = std::sqrt(k * k + 2.0 * m * V);
    const double r = (kp - k) / (kp + k);
    return r * r;
}

/// Harmonic-well closed forms (U = mu w^2 y^2 / 2).
inline double harmonic_action_eps_derivative(double y, double eps, double mu, double omega) {
    const double amp = std::sqrt(2.0 * eps / (mu * omega * omega));
    return std::asin(y / amp) / omega;
}

} // namespace oracles
