#include "chronoclock/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace chronoclock {

namespace {
constexpr double kPi = std::numbers::pi;

struct OriginValues {
    cplx psi;   // psi(0)
    cplx dpsi;  // psi'(0)
    cplx ppsi;  // (p psi)(0)
};

OriginValues origin_values(const WaveFunction& psi) {
    const Grid& g = psi.grid();
    if (g.x_min() > 0.0 || g.x_max() < 0.0)
        throw std::invalid_argument("origin readout: x = 0 outside grid");
    const WaveFunction tilde = psi.to(Rep::Momentum);
    cplx s0{0.0, 0.0}, s1{0.0, 0.0};
    for (std::size_t k = 0; k < g.n(); ++k) {
        s0 += tilde[k];
        s1 += g.p(k) * tilde[k];
    }
    const double scale = g.dp() / std::sqrt(2.0 * kPi);
    OriginValues v;
    v.psi = scale * s0;
    v.ppsi = scale * s1;
    v.dpsi = cplx{0.0, 1.0} * v.ppsi; // d/dx = i p under the transform convention
    return v;
}

std::vector<double> trapezoid_weights(std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (n >= 2) { w.front() = 0.5; w.back() = 0.5; }
    return w;
}

} // namespace

Distribution Distribution::make(Axis axis, double x0, double dx, std::vector<double> density,
                                bool quasi) {
    if (density.size() < 2) throw std::invalid_argument("Distribution: need >= 2 samples");
    if (!(dx > 0.0)) throw std::invalid_argument("Distribution: dx must be positive");
    Distribution d;
    d.axis = axis;
    d.x0 = x0;
    d.dx = dx;
    d.density = std::move(density);
    d.quasi = quasi;
    if (!quasi) {
        double peak = 0.0;
        for (double v : d.density) peak = std::max(peak, std::abs(v));
        for (double& v : d.density) {
            if (v < 0.0) {
                if (v < -1e-12 * peak)
                    throw std::invalid_argument("Distribution: negative density in a "
                                                "non-quasi distribution");
                v = 0.0;
            }
        }
    }
    d.total_mass = d.trapezoid_mass();
    d.raw_mass = d.total_mass;
    return d;
}

double Distribution::trapezoid_mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < density.size(); ++i)
        s += 0.5 * (density[i] + density[i + 1]);
    return s * dx;
}

void Distribution::renormalize() {
    const double mass = trapezoid_mass();
    if (!(std::abs(mass) > 0.0))
        throw std::runtime_error("Distribution: cannot renormalize zero mass");
    for (double& v : density) v /= mass;
    total_mass = trapezoid_mass();
}

double current_at_origin(const WaveFunction& psi, double m) {
    const OriginValues v = origin_values(psi);
    // (i/2m)(psi* psi' - psi'* psi) = -(1/m) Im[psi*(0) psi'(0)]
    return -std::imag(std::conj(v.psi) * v.dpsi) / m;
}

double kinetic_energy_density_at_origin(const WaveFunction& psi) {
    const OriginValues v = origin_values(psi);
    return std::norm(v.ppsi);
}

std::vector<double> current_series(std::span<const WaveFunction> snapshots, double m) {
    std::vector<double> out(snapshots.size());
    for (std::size_t i = 0; i < snapshots.size(); ++i)
        out[i] = current_at_origin(snapshots[i], m);
    return out;
}

std::vector<double> ked_series(std::span<const WaveFunction> snapshots) {
    std::vector<double> out(snapshots.size());
    for (std::size_t i = 0; i < snapshots.size(); ++i)
        out[i] = kinetic_energy_density_at_origin(snapshots[i]);
    return out;
}

Distribution current_distribution(std::span<const WaveFunction> snapshots, double dt_snap,
                                  double m) {
    return Distribution::make(Distribution::Axis::TimeT, 0.0, dt_snap,
                              current_series(snapshots, m), /*quasi=*/true);
}

Distribution normalized_strong_arrival(std::span<const WaveFunction> snapshots,
                                       double dt_snap, double m, double mean_p) {
    if (std::abs(mean_p) < 1e-12)
        throw std::invalid_argument("normalized_strong_arrival: mean momentum ~ 0");
    std::vector<double> dens = ked_series(snapshots);
    for (double& v : dens) v /= (m * std::abs(mean_p));
    auto d = Distribution::make(Distribution::Axis::TimeT, 0.0, dt_snap, std::move(dens));
    if (d.total_mass < 0.1) {
        std::ostringstream msg;
        msg << "normalized_strong_arrival: window mass " << d.total_mass
            << " (packet never at the origin within the snapshot window)";
        throw std::runtime_error(msg.str());
    }
    return d;
}

Distribution dwell_semiclassical(const WaveFunction& psi0, double L, double m,
                                 std::size_t n_t) {
    if (!(L > 0.0) || !(m > 0.0))
        throw std::invalid_argument("dwell_semiclassical: L and m must be positive");
    if (n_t < 16) throw std::invalid_argument("dwell_semiclassical: n_t too small");

    const WaveFunction tilde = psi0.to(Rep::Momentum);
    const WaveFunction pos = psi0.to(Rep::Position);
    const Grid& g = tilde.grid();

    // |p| support bounds holding all but 1e-8 of the momentum mass per side.
    std::vector<std::pair<double, double>> bins(g.n());
    double total = 0.0;
    for (std::size_t k = 0; k < g.n(); ++k) {
        const double w = std::norm(tilde[k]) * g.dp();
        bins[k] = {std::abs(g.p(k)), w};
        total += w;
    }
    std::sort(bins.begin(), bins.end());
    constexpr double tail = 1e-8;
    double acc = 0.0, p_lo = 0.0;
    for (const auto& [p, w] : bins) {
        acc += w;
        if (acc > tail * total) { p_lo = p; break; }
    }
    if (!(p_lo > 0.0))
        throw std::invalid_argument("dwell_semiclassical: momentum mass near p = 0 "
                                    "above threshold (t tail unrepresentable)");
    acc = 0.0;
    double p_hi = bins.back().first;
    for (auto it = bins.rbegin(); it != bins.rend(); ++it) {
        acc += it->second;
        if (acc > tail * total) { p_hi = it->first; break; }
    }

    const double t_min = (2.0 * m * L / p_hi) / 1.05;
    const double t_max = (2.0 * m * L / p_lo) * 1.05;
    const double dt = (t_max - t_min) / static_cast<double>(n_t - 1);

    std::vector<double> dens(n_t);
    for (std::size_t i = 0; i < n_t; ++i) {
        const double t = t_min + static_cast<double>(i) * dt;
        const double p = 2.0 * m * L / t;
        const double jac = p / t; // 2mL/t^2
        dens[i] = jac * (std::norm(pos.momentum_amplitude_at(p)) +
                         std::norm(pos.momentum_amplitude_at(-p)));
    }
    return Distribution::make(Distribution::Axis::TimeT, t_min, dt, std::move(dens));
}

SmearKernel SmearKernel::identity(const Distribution& d) {
    SmearKernel k;
    k.t0 = d.x0; k.dt = d.dx; k.nt = d.size();
    k.s0 = d.x0; k.ds = d.dx; k.ns = d.size();
    k.R.assign(k.nt * k.ns, 0.0);
    for (std::size_t i = 0; i < k.nt; ++i) k.at(i, i) = 1.0 / k.ds;
    return k;
}

SmearKernel SmearKernel::convolution(const Distribution& d, std::span<const double> r,
                                     double r_first) {
    SmearKernel k;
    k.t0 = d.x0; k.dt = d.dx; k.nt = d.size();
    k.s0 = d.x0; k.ds = d.dx; k.ns = d.size();
    k.R.assign(k.nt * k.ns, 0.0);
    for (std::size_t i = 0; i < k.nt; ++i) {
        for (std::size_t j = 0; j < k.ns; ++j) {
            const double u = (k.t0 + static_cast<double>(i) * k.dt) -
                             (k.s0 + static_cast<double>(j) * k.ds);
            const double idx = (u - r_first) / k.dt;
            const auto n = static_cast<std::ptrdiff_t>(std::llround(idx));
            if (n >= 0 && n < static_cast<std::ptrdiff_t>(r.size()) &&
                std::abs(idx - static_cast<double>(n)) < 1e-6)
                k.at(i, j) = r[static_cast<std::size_t>(n)];
        }
    }
    return k;
}

Distribution smear(const Distribution& ideal, const SmearKernel& kernel) {
    const double tol = 1e-9 * (std::abs(ideal.dx) + std::abs(ideal.x0) + 1.0);
    if (kernel.ns != ideal.size() || std::abs(kernel.s0 - ideal.x0) > tol ||
        std::abs(kernel.ds - ideal.dx) > tol)
        throw std::invalid_argument("smear: kernel/lattice mismatch");
    std::vector<double> out(kernel.nt, 0.0);
    for (std::size_t i = 0; i < kernel.nt; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < kernel.ns; ++j) s += kernel.at(i, j) * ideal.density[j];
        out[i] = s * kernel.ds;
    }
    return Distribution::make(ideal.axis, kernel.t0, kernel.dt, std::move(out), ideal.quasi);
}

double coarse_grain(const Distribution& dist, double t1, double t2) {
    const double lo = dist.x0, hi = dist.x_last();
    const double tol = 1e-9 * (std::abs(hi - lo) + 1.0);
    if (!(t1 < t2)) throw std::invalid_argument("coarse_grain: need t1 < t2");
    if (t1 < lo - tol || t2 > hi + tol)
        throw std::invalid_argument("coarse_grain: interval outside the lattice span");
    const double a = std::clamp(t1, lo, hi);
    const double b = std::clamp(t2, lo, hi);

    // Integral of the piecewise-linear density from lo to t.
    auto cumulative = [&](double t) {
        const double u = (t - lo) / dist.dx;
        auto j = static_cast<std::size_t>(u);
        if (j >= dist.size() - 1) j = dist.size() - 2;
        double s = 0.0;
        for (std::size_t i = 0; i < j; ++i)
            s += 0.5 * (dist.density[i] + dist.density[i + 1]) * dist.dx;
        const double frac = t - (lo + static_cast<double>(j) * dist.dx);
        const double rho_t = dist.density[j] +
                             (dist.density[j + 1] - dist.density[j]) * (frac / dist.dx);
        s += 0.5 * (dist.density[j] + rho_t) * frac;
        return s;
    };
    return cumulative(b) - cumulative(a);
}

Distribution weak_arrival_prediction(std::span<const WaveFunction> snapshots, double dt_snap,
                                     const ClockModel& clock, double lambda, double m) {
    const std::vector<double> j_series = current_series(snapshots, m);
    const std::vector<double> w = trapezoid_weights(j_series.size());
    double j_mass = 0.0;
    for (std::size_t i = 0; i < j_series.size(); ++i) j_mass += w[i] * j_series[i] * dt_snap;
    if (j_mass < 0.999)
        throw std::runtime_error("weak_arrival_prediction: snapshot window holds only " +
                                 std::to_string(j_mass) + " of the current mass");

    const Grid& yg = clock.ygrid();
    std::vector<double> dens(yg.n(), 0.0);
    for (std::size_t i = 0; i < j_series.size(); ++i) {
        if (j_series[i] == 0.0) continue;
        const auto phi = clock_response(clock, lambda, static_cast<double>(i) * dt_snap);
        const double f = w[i] * j_series[i] * dt_snap;
        for (std::size_t j = 0; j < yg.n(); ++j) dens[j] += f * std::norm(phi[j]);
    }
    auto d = Distribution::make(Distribution::Axis::PointerY, yg.x_min(), yg.dx(),
                                std::move(dens), /*quasi=*/true);
    d.renormalize();
    return d;
}

Distribution strong_arrival_prediction(std::span<const WaveFunction> snapshots,
                                       double dt_snap, double lambda, double m, double mean_p,
                                       const Grid& ygrid) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("strong_arrival_prediction: lambda must be positive");
    const Distribution pin = normalized_strong_arrival(snapshots, dt_snap, m, mean_p);

    std::vector<double> dens(ygrid.n(), 0.0);
    for (std::size_t j = 0; j < ygrid.n(); ++j) {
        const double t = ygrid.x(j) / lambda;
        if (t < 0.0 || t > pin.x_last()) continue;
        const double u = t / pin.dx;
        auto i = static_cast<std::size_t>(u);
        if (i >= pin.size() - 1) i = pin.size() - 2;
        const double frac = u - static_cast<double>(i);
        dens[j] = (pin.density[i] * (1.0 - frac) + pin.density[i + 1] * frac) / lambda;
    }
    return Distribution::make(Distribution::Axis::PointerY, ygrid.x_min(), ygrid.dx(),
                              std::move(dens));
}

Distribution weak_dwell_prediction(const WaveFunction& psi0, const ClockModel& clock,
                                   double lambda, double L, double m, std::size_t n_t) {
    const Distribution sc = dwell_semiclassical(psi0, L, m, n_t);
    const Grid& yg = clock.ygrid();
    std::vector<double> dens(yg.n(), 0.0);
    for (std::size_t i = 0; i < sc.size(); ++i) {
        if (sc.density[i] == 0.0) continue;
        const auto phi = clock_response(clock, lambda, sc.coordinate(i));
        const double f = sc.density[i] * sc.dx;
        for (std::size_t j = 0; j < yg.n(); ++j) dens[j] += f * std::norm(phi[j]);
    }
    return Distribution::make(Distribution::Axis::PointerY, yg.x_min(), yg.dx(),
                              std::move(dens));
}

Distribution pointer_distribution(const CompositeState& state) {
    const ClockModel& clock = state.clock();
    const Grid& yg = clock.ygrid();
    const std::size_t n_ch = state.n_channels();
    if (n_ch == 0) throw std::invalid_argument("pointer_distribution: no channels");
    const Grid& xg = state.channel(0).grid();
    for (std::size_t i = 1; i < n_ch; ++i)
        if (!(state.channel(i).grid() == xg))
            throw std::invalid_argument("pointer_distribution: inconsistent channel grids");

    // Pi(y) = sum_ab c_a c_b* u_a(y) u_b*(y) G_ab,  G_ab = int psi_a psi_b* dx.
    const double sqrt_measure = std::sqrt(clock.measure());
    std::vector<cplx> c(n_ch);
    for (std::size_t i = 0; i < n_ch; ++i) c[i] = state.weight(i) * sqrt_measure;

    std::vector<double> dens(yg.n(), 0.0);
    const double dx = xg.dx();
    for (std::size_t a = 0; a < n_ch; ++a) {
        const auto pa = state.channel(a).amplitudes();
        const auto ua = clock.eigenfunction(a);
        { // diagonal term
            double gaa = 0.0;
            for (std::size_t j = 0; j < xg.n(); ++j) gaa += std::norm(pa[j]);
            const double maa = std::norm(c[a]) * gaa * dx;
            for (std::size_t j = 0; j < yg.n(); ++j) dens[j] += maa * std::norm(ua[j]);
        }
        for (std::size_t b = a + 1; b < n_ch; ++b) {
            const auto pb = state.channel(b).amplitudes();
            cplx gab{0.0, 0.0};
            for (std::size_t j = 0; j < xg.n(); ++j) gab += pa[j] * std::conj(pb[j]);
            const cplx mab = c[a] * std::conj(c[b]) * gab * dx;
            const auto ub = clock.eigenfunction(b);
            for (std::size_t j = 0; j < yg.n(); ++j) {
                const cplx cross = ua[j] * std::conj(ub[j]);
                dens[j] += 2.0 * (mab.real() * cross.real() - mab.imag() * cross.imag());
            }
        }
    }
    return Distribution::make(Distribution::Axis::PointerY, yg.x_min(), yg.dx(),
                              std::move(dens));
}

} // namespace chronoclock
