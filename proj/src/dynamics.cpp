#include "chronoclock/dynamics.hpp"

#include "chronoclock/fft.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace chronoclock {

double effective_kinetic_energy(const WaveFunction& psi, double m, double tail) {
    const WaveFunction tilde = psi.to(Rep::Momentum);
    const Grid& g = tilde.grid();
    std::vector<std::pair<double, double>> bins(g.n()); // (|p|, mass)
    double total = 0.0;
    for (std::size_t k = 0; k < g.n(); ++k) {
        const double w = std::norm(tilde[k]) * g.dp();
        bins[k] = {std::abs(g.p(k)), w};
        total += w;
    }
    std::sort(bins.begin(), bins.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    double acc = 0.0;
    double p_eff = g.p_max();
    for (const auto& [p, w] : bins) {
        acc += w;
        if (acc > tail * total) { p_eff = p; break; }
    }
    return p_eff * p_eff / (2.0 * m);
}

std::vector<WaveFunction> evolve_step_potential(const WaveFunction& psi0,
                                                const StepPotentialSpec& spec, double dt,
                                                std::size_t n_steps,
                                                const EvolveOptions& opts) {
    if (!(spec.mass > 0.0)) throw std::invalid_argument("evolve: mass must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("evolve: dt must be positive");
    if (n_steps == 0) throw std::invalid_argument("evolve: n_steps must be positive");

    const WaveFunction start = psi0.to(Rep::Position);
    const Grid& g = start.grid();
    const std::size_t n = g.n();

    const double e_eff = effective_kinetic_energy(start, spec.mass, opts.momentum_tail);
    const double scale = std::max(std::abs(spec.V), e_eff);
    if (dt * scale > opts.phase_bound * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "evolve: stability bound violated: dt*max(|V|,E_eff) = " << dt * scale
            << " > " << opts.phase_bound;
        throw std::invalid_argument(msg.str());
    }

    std::size_t stride = opts.snapshot_stride;
    if (stride == 0) stride = std::max<std::size_t>(1, n_steps / 2000);

    const bool has_potential = spec.V != 0.0;
    std::vector<cplx> half(n), full(n), kin(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double ph = -spec.V * spec.region.chi(g.x(j)) * dt * 0.5;
        half[j] = {std::cos(ph), std::sin(ph)};
        full[j] = half[j] * half[j];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double p = g.p(k);
        const double ph = -p * p * dt / (2.0 * spec.mass);
        kin[k] = cplx{std::cos(ph), std::sin(ph)} * inv_n;
    }

    auto mul = [n](std::vector<cplx>& a, const std::vector<cplx>& f) {
        auto* da = reinterpret_cast<double*>(a.data());
        const auto* df = reinterpret_cast<const double*>(f.data());
        for (std::size_t j = 0; j < 2 * n; j += 2) {
            const double re = da[j] * df[j] - da[j + 1] * df[j + 1];
            const double im = da[j] * df[j + 1] + da[j + 1] * df[j];
            da[j] = re;
            da[j + 1] = im;
        }
    };

    std::vector<WaveFunction> snaps;
    snaps.reserve(n_steps / stride + 2);
    snaps.push_back(start);

    auto check_edges = [&](const std::vector<cplx>& amp, std::size_t step) {
        if (!opts.check_edges) return;
        const std::size_t k = std::min<std::size_t>(8, n / 2);
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += std::norm(amp[j]) + std::norm(amp[n - 1 - j]);
        s *= g.dx();
        if (s > opts.edge_threshold) {
            std::ostringstream msg;
            msg << "evolve: probability " << s << " at grid edges after step " << step
                << " exceeds " << opts.edge_threshold << " (box too small)";
            throw std::runtime_error(msg.str());
        }
    };
    check_edges(std::vector<cplx>(start.amplitudes().begin(), start.amplitudes().end()), 0);

    std::vector<cplx> a(start.amplitudes().begin(), start.amplitudes().end());
    if (has_potential) mul(a, half);
    for (std::size_t step = 1; step <= n_steps; ++step) {
        fft::transform_pow2(a, -1);
        mul(a, kin);
        fft::transform_pow2(a, +1);
        const bool boundary = (step % stride == 0) || step == n_steps;
        if (boundary) {
            if (has_potential) mul(a, half);
            snaps.emplace_back(g, Rep::Position, a);
            check_edges(a, step);
            if (step < n_steps && has_potential) mul(a, half);
        } else if (has_potential) {
            mul(a, full);
        }
    }
    return snaps;
}

double CompositeState::region_probability() const {
    // The clock eigenfunctions are orthonormal under lattice quadrature, so
    // cross-channel terms integrate to zero over y.
    double s = 0.0;
    for (std::size_t i = 0; i < psi_.size(); ++i)
        s += std::norm(clock_.weight(i)) * clock_.measure() * region_prob_[i];
    return s;
}

CompositeState evolve_composite(const WaveFunction& psi0, const ClockModel& clock,
                                double lambda, const Region& region, double tau, double dt,
                                double m, const CompositeOptions& opts) {
    if (!(tau > 0.0)) throw std::invalid_argument("evolve_composite: tau must be positive");
    if (clock.truncation_deficit() > 1e-8)
        throw std::invalid_argument("evolve_composite: clock truncation deficit exceeds 1e-8");

    const auto n_steps = static_cast<std::size_t>(std::llround(tau / dt));
    if (n_steps == 0) throw std::invalid_argument("evolve_composite: tau/dt rounds to zero steps");
    const double dt_actual = tau / static_cast<double>(n_steps);

    const WaveFunction start = psi0.to(Rep::Position);
    const std::size_t n_ch = clock.n_channels();

    std::vector<WaveFunction> finals;
    finals.reserve(n_ch);
    for (std::size_t i = 0; i < n_ch; ++i) finals.push_back(start); // placeholder slots
    std::vector<double> region_prob(n_ch, 0.0);

    EvolveOptions ev = opts.evolve;
    ev.snapshot_stride = n_steps; // final state only

    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto run_channel = [&](std::size_t i) {
        try {
            const StepPotentialSpec spec{lambda * clock.eigenvalue(i), region, m};
            auto snaps = evolve_step_potential(start, spec, dt_actual, n_steps, ev);
            finals[i] = std::move(snaps.back());
            region_prob[i] = probability_in_region(finals[i], region);
        } catch (...) {
            std::scoped_lock lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    const std::size_t n_threads = std::max<std::size_t>(1, std::min(opts.n_threads, n_ch));
    if (n_threads == 1) {
        for (std::size_t i = 0; i < n_ch; ++i) run_channel(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < n_ch; i += n_threads) run_channel(i);
            });
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<std::string> warnings;
    for (std::size_t i = 0; i < n_ch; ++i) {
        if (region_prob[i] >= opts.exit_threshold) {
            std::ostringstream msg;
            msg << "channel eps=" << clock.eigenvalue(i) << " retains region probability "
                << region_prob[i] << " at tau=" << tau;
            if (opts.exit_strict)
                throw std::runtime_error("evolve_composite: " + msg.str() +
                                         " (exit criterion unmet)");
            warnings.push_back(msg.str());
        }
    }
    return CompositeState(clock, std::move(finals), tau, std::move(region_prob),
                          std::move(warnings));
}

} // namespace chronoclock
