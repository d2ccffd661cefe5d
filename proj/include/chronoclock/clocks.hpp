#pragma once

#include "chronoclock/lattice.hpp"

#include <functional>
#include <vector>

namespace chronoclock {

/// Clock Hamiltonian model with its truncated eigensystem and initial state.
///
/// Channels are stored sorted by eigenvalue. Eigenfunctions u_eps(y) are
/// lattice-normalized, sum_j |u(y_j)|^2 dy = 1, with phase fixed real and
/// positive at the reference point y = 0 (or at the largest component when
/// the state vanishes there). Weights are spectral amplitudes <eps|phi0>;
/// sum |w|^2 * measure = 1 up to the truncation deficit. `measure` is the
/// eigenvalue lattice spacing d_eps for momentum-lattice spectra and 1 for
/// the discrete spectrum of a potential well.
class ClockModel {
public:
    enum class Kind { LinearMomentum, FreeParticle, PotentialWell };

    static ClockModel linear_momentum(const WaveFunction& phi0,
                                      double truncation_deficit = 1e-8);
    static ClockModel free_particle(const WaveFunction& phi0, double mu,
                                    double truncation_deficit = 1e-8);
    static ClockModel potential_well(const WaveFunction& phi0, double mu,
                                     const std::function<double(double)>& potential,
                                     double truncation_deficit = 1e-8);

    Kind kind() const { return kind_; }
    const Grid& ygrid() const { return phi0_.grid(); }
    const WaveFunction& initial_state() const { return phi0_; }
    double mu() const { return mu_; }
    double potential_at(double y) const;

    std::size_t n_channels() const { return eps_.size(); }
    double eigenvalue(std::size_t i) const { return eps_[i]; }
    std::span<const cplx> eigenfunction(std::size_t i) const { return funcs_[i]; }
    cplx weight(std::size_t i) const { return weights_[i]; }
    double measure() const { return measure_; }
    double truncation_deficit() const { return deficit_; }

    /// Mean and standard deviation of |<eps|phi0>|^2 over the kept channels.
    double eps_mean() const;
    double eps_std() const;

private:
    ClockModel(Kind kind, WaveFunction phi0, double mu)
        : kind_(kind), phi0_(std::move(phi0)), mu_(mu) {}

    Kind kind_;
    WaveFunction phi0_;
    double mu_ = 0.0;
    std::function<double(double)> potential_;
    std::vector<double> eps_;
    std::vector<std::vector<cplx>> funcs_;
    std::vector<cplx> weights_;
    double measure_ = 1.0;
    double deficit_ = 0.0;
};

/// Clock response Phi(y,t) = sum_eps <y|eps><eps|phi0> e^{-i lambda eps t},
/// sampled on the clock grid. Unit norm for all t.
std::vector<cplx> clock_response(const ClockModel& clock, double lambda, double t);

/// Overlap integral of clock states evolved for times differing by delta_t:
/// sum_eps |<eps|phi0>|^2 e^{-i lambda eps delta_t}, normalized to 1 at 0.
cplx resolution_overlap(const ClockModel& clock, double lambda, double delta_t);

/// Clock resolution 1/(lambda sigma_eps). Returns +infinity for an
/// eigenstate clock (sigma_eps = 0).
double resolution_time(const ClockModel& clock, double lambda);

/// WKB eigenstate data: Hamilton-Jacobi action S(y, eps) measured from the
/// reference point y = 0 and amplitude C(y, eps), sampled on the classically
/// allowed interval containing the reference point. C is normalized so
/// that the integral of C^2 over that interval is 1.
struct WKBEigenstate {
    double epsilon = 0.0;
    double mu = 0.0;
    Grid ygrid = Grid::make(-1.0, 1.0, 2);
    std::vector<double> potential;   // U(y_j)
    std::vector<double> turning_points;
    std::vector<double> action;      // S(y_j); NaN outside the allowed interval
    std::vector<double> amplitude;   // C(y_j); NaN outside
    bool exact_plane_wave = false;   // linear-momentum clock, S = eps*y

    bool allowed(std::size_t j) const;
    double action_at(double y) const;     // linear interpolation
    double amplitude_at(double y) const;
};

WKBEigenstate wkb_eigenstate(const ClockModel& clock, double epsilon);

/// Pointer-to-time map t = (1/lambda) dS/d eps, by central difference with
/// relative step 1e-4 in eps (exact for the linear-momentum clock).
double hj_time_map(const WKBEigenstate& wkb, double lambda, double y);

} // namespace chronoclock
