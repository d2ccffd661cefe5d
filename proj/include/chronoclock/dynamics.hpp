#pragma once

#include "chronoclock/clocks.hpp"
#include "chronoclock/lattice.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace chronoclock {

/// Channel Hamiltonian H0 + V*chi(x) for one clock eigenvalue.
struct StepPotentialSpec {
    double V = 0.0;
    Region region = Region::half_line();
    double mass = 1.0;
};

struct EvolveOptions {
    std::size_t snapshot_stride = 0; // 0: auto, at most ~2000 snapshots
    bool check_edges = true;
    double edge_threshold = 1e-4;
    double phase_bound = 0.1;        // dt * max(|V|, E_eff) <= phase_bound
    double momentum_tail = 1e-8;     // tail mass defining the packet's E_eff
};

/// Kinetic energy scale of the state: p_eff^2/2m with p_eff the smallest
/// |p| bound holding all but `tail` of the momentum distribution.
double effective_kinetic_energy(const WaveFunction& psi, double m, double tail = 1e-8);

/// Strang-split evolution exp(-iVchi dt/2) exp(-ip^2 dt/2m) exp(-iVchi dt/2)
/// per step. Returns snapshots in position representation; snapshot 0 is the
/// initial state and the final state is always included. Norm is conserved;
/// global error O(dt^2).
std::vector<WaveFunction> evolve_step_potential(const WaveFunction& psi0,
                                                const StepPotentialSpec& spec, double dt,
                                                std::size_t n_steps,
                                                const EvolveOptions& opts = {});

struct CompositeOptions {
    std::size_t n_threads = 1;
    double exit_threshold = 1e-3;  // final per-channel probability left in region
    bool exit_strict = true;       // throw (weak) vs record a warning (strong)
    EvolveOptions evolve;
};

/// Final state of particle + clock, stored as clock-eigenvalue channels.
/// Psi(x,y,tau) = sum_eps w_eps sqrt(measure) <y|eps> psi_eps(x).
class CompositeState {
public:
    CompositeState(ClockModel clock, std::vector<WaveFunction> channel_psi, double tau,
                   std::vector<double> final_region_probability,
                   std::vector<std::string> warnings)
        : clock_(std::move(clock)), psi_(std::move(channel_psi)), tau_(tau),
          region_prob_(std::move(final_region_probability)),
          warnings_(std::move(warnings)) {}

    const ClockModel& clock() const { return clock_; }
    std::size_t n_channels() const { return psi_.size(); }
    const WaveFunction& channel(std::size_t i) const { return psi_[i]; }
    double epsilon(std::size_t i) const { return clock_.eigenvalue(i); }
    cplx weight(std::size_t i) const { return clock_.weight(i); }
    double elapsed() const { return tau_; }

    /// Kept clock-state mass, 1 - truncation deficit.
    double completeness() const { return 1.0 - clock_.truncation_deficit(); }
    std::span<const double> final_region_probability() const { return region_prob_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    /// Probability currently inside the region, integrated over the clock axis.
    double region_probability() const;

private:
    ClockModel clock_;
    std::vector<WaveFunction> psi_;
    double tau_;
    std::vector<double> region_prob_;
    std::vector<std::string> warnings_;
};

/// Evolve every kept clock channel under H0 + lambda*eps*chi(x) for time tau
/// (particle mass m). Channels run independently (optionally in parallel);
/// assembly order is fixed by the clock's eigenvalue ordering, so results
/// are reproducible.
CompositeState evolve_composite(const WaveFunction& psi0, const ClockModel& clock,
                                double lambda, const Region& region, double tau, double dt,
                                double m, const CompositeOptions& opts = {});

} // namespace chronoclock
