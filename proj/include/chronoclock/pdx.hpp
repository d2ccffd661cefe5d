#pragma once

#include "chronoclock/lattice.hpp"

#include <complex>
#include <cstddef>

namespace chronoclock::pdx {

/// Branch convention: sqrt(i) = e^{i pi/4} globally, so
/// (m/2 pi i tau)^{1/2} = sqrt(m/2 pi tau) e^{-i pi/4}.

/// Free propagator (m/2 pi i tau)^{1/2} exp(i m (x_to-x_from)^2 / 2 tau).
cplx free_propagator(double x_to, double tau, double x_from, double m);

/// Method-of-images restricted propagator summed over paths in x > 0 under
/// the step of height V:
///   theta(x_to) theta(x_from) [g_f(x_to,tau|x_from) - g_f(-x_to,tau|x_from)] e^{-iV tau}.
/// The phase is e^{-iV tau} for forward evolution under +V in x > 0; the
/// sign is pinned against the grid oracle in the tests.
cplx restricted_propagator_image(double x_to, double tau, double x_from, double V, double m);

/// Free propagator from a Gaussian-regularized source of width sigma
/// (density-normalized), in closed form.
cplx gaussian_smeared_free_propagator(double x_to, double tau, double x_from, double m,
                                      double sigma);

/// Derived sizing shared by the first-crossing evaluator and its tests.
struct SourceParams {
    double k_star = 0.0;     // classical crossing momentum m(x0+|x1|)/tau
    double k_flat = 0.0;     // momentum window: flat below this
    double k_cut = 0.0;      // and zero above this
    double sigma = 0.0;      // auto source width
    std::size_t n_quad = 0;  // crossing-time quadrature nodes
};

struct Options {
    double source_sigma = 0.0;  // 0: auto width with width->0 extrapolation
    std::size_t n_points = 4096;
    std::size_t n_quad = 0;     // 0: auto
    double conv_tol = 0.02;     // quadrature self-consistency bound
};

SourceParams auto_params(double x_to, double x_from, double tau, double V, double m,
                         const Options& opts);

/// Grid sized so the windowed source content stays inside the box for the
/// whole run, with x_to and the origin on lattice points.
Grid make_grid(double x_to, double x_from, double tau, double V, double m,
               std::size_t n_points);

/// Gaussian-regularized point source, band-limited by a cos^2 momentum
/// taper between k_flat and k_cut. Density-normalized: sum psi dx = 1.
WaveFunction regularized_source(const Grid& g, double center, double sigma, double k_flat,
                                double k_cut);

/// First-crossing path decomposition of <x_to| exp(-i(H0+V theta(x)) tau) |x_from>,
///   (i/2m) int_0^tau dt  g(x_to,tau|0,t) dg_r/dx|_0(t; x_from),
/// with the post-crossing propagator from grid evolution of a regularized
/// source on the crossing surface. Requires x_to < 0 < x_from.
cplx first_crossing(double x_to, double x_from, double tau, double V, double m,
                    const Options& opts = {});

/// Same decomposition with the post-crossing propagator replaced by free
/// propagation (valid for E >> V).
cplx semiclassical(double x_to, double x_from, double tau, double V, double m,
                   const Options& opts = {});

/// int_0^inf ds <x|e^{-iH0 s} p|0> e^{iEs} = m exp(i|x| sqrt(2mE)).
cplx scattering_integral(double x, double E, double m);

/// int_0^inf dt <x|e^{-i(H0 - V_wall theta(-x)) t}|0> e^{iEt} for x < 0:
///   (2m/(k+k')) exp(-i x k'),  k = sqrt(2mE), k' = sqrt(2m(E+V_wall)).
/// The prefactor reduces to sqrt(2m/V_wall) in the strong-wall limit.
cplx strong_coupling_wall_integral(double x, double E, double V_wall, double m);

} // namespace chronoclock::pdx
