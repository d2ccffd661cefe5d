#pragma once

#include "chronoclock/clocks.hpp"
#include "chronoclock/dynamics.hpp"
#include "chronoclock/lattice.hpp"

#include <span>
#include <vector>

namespace chronoclock {

/// Sampled real density over a uniform 1D lattice (pointer position y or
/// time t). `total_mass` tracks the trapezoid mass of the stored samples;
/// `raw_mass` preserves the mass before any renormalization. Signed samples
/// are only permitted when tagged `quasi` (the current can be negative).
struct Distribution {
    enum class Axis { PointerY, TimeT };

    Axis axis = Axis::TimeT;
    double x0 = 0.0;
    double dx = 0.0;
    std::vector<double> density;
    bool quasi = false;
    double total_mass = 0.0;
    double raw_mass = 0.0;

    static Distribution make(Axis axis, double x0, double dx, std::vector<double> density,
                             bool quasi = false);

    std::size_t size() const { return density.size(); }
    double coordinate(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }
    double x_last() const { return coordinate(density.size() - 1); }
    double trapezoid_mass() const;

    /// Scale the density to unit trapezoid mass; raw_mass keeps the original.
    void renormalize();
};

/// Probability current at the origin, J = -(1/m) Im[psi*(0) psi'(0)], with
/// psi(0) and psi'(0) evaluated by band-limited (spectral) interpolation.
/// Signed; negative values are the backflow effect.
double current_at_origin(const WaveFunction& psi, double m);

/// Kinetic-energy density at the origin, |(p psi)(0)|^2 >= 0.
double kinetic_energy_density_at_origin(const WaveFunction& psi);

/// Per-snapshot series of the two densities above.
std::vector<double> current_series(std::span<const WaveFunction> snapshots, double m);
std::vector<double> ked_series(std::span<const WaveFunction> snapshots);

/// J(t) over a uniform snapshot lattice (quasi distribution; may dip
/// negative through backflow).
Distribution current_distribution(std::span<const WaveFunction> snapshots, double dt_snap,
                                  double m);

/// Pi_N(t) = |(p psi_t)(0)|^2 / (m |<p>|): the detection-normalized strong
/// arrival distribution. Throws when the packet never reaches the origin
/// within the snapshot window or when mean_p is ~0.
Distribution normalized_strong_arrival(std::span<const WaveFunction> snapshots,
                                       double dt_snap, double m, double mean_p);

/// Dwell-time density under t = 2mL/|p|:
/// Pi(t) = (2mL/t^2) [ |psi~(2mL/t)|^2 + |psi~(-2mL/t)|^2 ].
/// Momentum amplitudes are evaluated band-limited at off-lattice points.
Distribution dwell_semiclassical(const WaveFunction& psi0, double L, double m,
                                 std::size_t n_t = 1024);

/// Response kernel R(t,s) sampled on a (t,s) lattice pair; `row_stochastic`
/// kernels satisfy sum_t R(t,s) dt = 1 per s.
struct SmearKernel {
    double t0 = 0.0, dt = 0.0;
    std::size_t nt = 0;
    double s0 = 0.0, ds = 0.0;
    std::size_t ns = 0;
    std::vector<double> R; // nt x ns, row-major

    double& at(std::size_t i, std::size_t j) { return R[i * ns + j]; }
    double at(std::size_t i, std::size_t j) const { return R[i * ns + j]; }

    static SmearKernel identity(const Distribution& d);
    /// R(t,s) = r(t-s) from samples of r on the same lattice spacing.
    static SmearKernel convolution(const Distribution& d, std::span<const double> r,
                                   double r_first);
};

/// Pi_C(t) = int R(t,s) Pi(s) ds by lattice quadrature.
Distribution smear(const Distribution& ideal, const SmearKernel& kernel);

/// p(t1,t2) = int_{t1}^{t2} Pi(t) dt for the piecewise-linear density.
double coarse_grain(const Distribution& dist, double t1, double t2);

/// Weak-coupling arrival prediction Pi(y) = int dt |Phi(y,t)|^2 J(t) over the
/// snapshot window, returned normalized (raw mass preserved in raw_mass).
Distribution weak_arrival_prediction(std::span<const WaveFunction> snapshots, double dt_snap,
                                     const ClockModel& clock, double lambda, double m);

/// Strong-coupling arrival prediction: the pullback of the normalized
/// kinetic-energy density under t = y/lambda, on the clock pointer lattice.
Distribution strong_arrival_prediction(std::span<const WaveFunction> snapshots,
                                       double dt_snap, double lambda, double m, double mean_p,
                                       const Grid& ygrid);

/// Weak-coupling dwell prediction Pi(y) = int dp |psi~(p)|^2 |Phi(y,2Lm/|p|)|^2,
/// evaluated as a t-lattice quadrature against the semiclassical dwell density.
Distribution weak_dwell_prediction(const WaveFunction& psi0, const ClockModel& clock,
                                   double lambda, double L, double m,
                                   std::size_t n_t = 1024);

/// Final clock-pointer distribution Pi(y) = int dx |Psi(x,y,tau)|^2.
Distribution pointer_distribution(const CompositeState& state);

} // namespace chronoclock
