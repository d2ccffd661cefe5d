#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace chronoclock {

using cplx = std::complex<double>;

/// Uniform 1D spatial lattice with its paired momentum lattice.
///
/// Grid points are x_j = x_min + j*dx, j = 0..n-1, with dx = (x_max-x_min)/n
/// (the point x_max itself is the periodic image of x_min). Momenta follow
/// standard DFT ordering: p_k = 2*pi*k/(n*dx) for k < n/2 and negative
/// frequencies above, spanning [-pi/dx, pi/dx).
class Grid {
public:
    static Grid make(double x_min, double x_max, std::size_t n_points);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t n() const { return n_; }
    double dx() const { return dx_; }
    double extent() const { return x_max_ - x_min_; }
    double dp() const { return dp_; }
    double p_max() const; // pi/dx

    double x(std::size_t j) const { return x_min_ + static_cast<double>(j) * dx_; }
    double p(std::size_t k) const;

    bool operator==(const Grid& o) const {
        return x_min_ == o.x_min_ && x_max_ == o.x_max_ && n_ == o.n_;
    }

private:
    Grid(double x_min, double x_max, std::size_t n);
    double x_min_, x_max_, dx_, dp_;
    std::size_t n_;
};

enum class Rep { Position, Momentum };

/// Complex amplitudes on a Grid, in position or momentum representation.
///
/// The transform convention is continuum-normalized so Parseval holds in the
/// integral sense: sum |psi|^2 dx == sum |psi~|^2 dp.
class WaveFunction {
public:
    WaveFunction(Grid grid, Rep rep, std::vector<cplx> amplitudes);

    const Grid& grid() const { return grid_; }
    Rep rep() const { return rep_; }
    std::span<const cplx> amplitudes() const { return amp_; }
    std::span<cplx> amplitudes_mut() { return amp_; }
    const cplx& operator[](std::size_t i) const { return amp_[i]; }

    double measure() const { return rep_ == Rep::Position ? grid_.dx() : grid_.dp(); }
    double norm_squared() const;
    double norm() const;

    /// Change of representation (unitary discrete Fourier transform).
    WaveFunction transformed() const;
    WaveFunction to(Rep target) const;

    double mean_x() const;      // position representation required
    double mean_p() const;      // computed spectrally
    double variance_p() const;

    /// Band-limited evaluation of psi~ at an arbitrary momentum
    /// (direct sum over position samples; exact trig interpolation).
    cplx momentum_amplitude_at(double p) const;

private:
    Grid grid_;
    Rep rep_;
    std::vector<cplx> amp_;
};

/// Characteristic function chi of the clock region: 1 strictly inside,
/// 0 strictly outside, 1/2 on boundary lattice points.
class Region {
public:
    enum class Kind { HalfLinePositive, Interval };

    static Region half_line();
    static Region interval(double half_width);

    Kind kind() const { return kind_; }
    double half_width() const { return half_width_; }
    double chi(double x) const;

    /// Classical traversal distance from x0 to exit at the far side.
    double exit_distance(double x0, double direction) const;

private:
    Region(Kind k, double L) : kind_(k), half_width_(L) {}
    Kind kind_;
    double half_width_;
};

/// Normalized Gaussian packet  ~ exp(-(x-x0)^2/(4 sigma^2) + i p0 x).
/// Momentum variance is 1/(4 sigma^2).
WaveFunction gaussian_state(const Grid& grid, double x0, double p0, double sigma);

/// sum chi(x_j) |psi_j|^2 dx  (position representation required).
double probability_in_region(const WaveFunction& psi, const Region& region);

/// Probability mass on the outermost `edge_points` lattice sites at each end.
double edge_probability(const WaveFunction& psi, std::size_t edge_points = 8);

} // namespace chronoclock
