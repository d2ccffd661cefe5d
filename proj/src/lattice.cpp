#include "chronoclock/lattice.hpp"

#include "chronoclock/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chronoclock {

namespace {
constexpr double kPi = std::numbers::pi;

double erfc_tail(double distance, double sigma) {
    // Mass of a unit Gaussian of width sigma beyond `distance` from its center.
    return 0.5 * std::erfc(distance / (std::sqrt(2.0) * sigma));
}
} // namespace

Grid::Grid(double x_min, double x_max, std::size_t n)
    : x_min_(x_min), x_max_(x_max), n_(n) {
    dx_ = (x_max - x_min) / static_cast<double>(n);
    dp_ = 2.0 * kPi / (x_max - x_min);
}

Grid Grid::make(double x_min, double x_max, std::size_t n_points) {
    if (!(x_max > x_min))
        throw std::invalid_argument("Grid: x_max must exceed x_min");
    if (n_points < 2 || !fft::is_pow2(n_points))
        throw std::invalid_argument("Grid: n_points must be a power of two >= 2");
    return Grid(x_min, x_max, n_points);
}

double Grid::p_max() const { return kPi / dx_; }

double Grid::p(std::size_t k) const {
    const auto n = static_cast<std::ptrdiff_t>(n_);
    auto ks = static_cast<std::ptrdiff_t>(k);
    if (ks >= n / 2) ks -= n;
    return dp_ * static_cast<double>(ks);
}

WaveFunction::WaveFunction(Grid grid, Rep rep, std::vector<cplx> amplitudes)
    : grid_(grid), rep_(rep), amp_(std::move(amplitudes)) {
    if (amp_.size() != grid_.n())
        throw std::invalid_argument("WaveFunction: amplitude count must match grid");
}

double WaveFunction::norm_squared() const {
    double s = 0.0;
    for (const cplx& a : amp_) s += std::norm(a);
    return s * measure();
}

double WaveFunction::norm() const { return std::sqrt(norm_squared()); }

WaveFunction WaveFunction::transformed() const {
    const std::size_t n = grid_.n();
    std::vector<cplx> out(amp_.begin(), amp_.end());
    if (rep_ == Rep::Position) {
        // psi~(p_k) = dx/sqrt(2 pi) * exp(-i p_k x_min) * sum_j psi_j e^{-2 pi i jk/n}
        fft::transform_pow2(out, -1);
        const double scale = grid_.dx() / std::sqrt(2.0 * kPi);
        for (std::size_t k = 0; k < n; ++k) {
            const double ph = -grid_.p(k) * grid_.x_min();
            out[k] *= scale * cplx{std::cos(ph), std::sin(ph)};
        }
        return WaveFunction(grid_, Rep::Momentum, std::move(out));
    }
    // psi(x_j) = dp/sqrt(2 pi) * sum_k psi~_k exp(+i p_k x_min) e^{+2 pi i jk/n}
    for (std::size_t k = 0; k < n; ++k) {
        const double ph = grid_.p(k) * grid_.x_min();
        out[k] *= cplx{std::cos(ph), std::sin(ph)};
    }
    fft::transform_pow2(out, +1);
    const double scale = grid_.dp() / std::sqrt(2.0 * kPi);
    for (cplx& a : out) a *= scale;
    return WaveFunction(grid_, Rep::Position, std::move(out));
}

WaveFunction WaveFunction::to(Rep target) const {
    if (rep_ == target) return *this;
    return transformed();
}

double WaveFunction::mean_x() const {
    if (rep_ != Rep::Position)
        throw std::invalid_argument("mean_x: position representation required");
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < amp_.size(); ++j) {
        const double w = std::norm(amp_[j]);
        num += grid_.x(j) * w;
        den += w;
    }
    return num / den;
}

double WaveFunction::mean_p() const {
    const WaveFunction tilde = to(Rep::Momentum);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < tilde.amp_.size(); ++k) {
        const double w = std::norm(tilde.amp_[k]);
        num += tilde.grid_.p(k) * w;
        den += w;
    }
    return num / den;
}

double WaveFunction::variance_p() const {
    const WaveFunction tilde = to(Rep::Momentum);
    double m1 = 0.0, m2 = 0.0, den = 0.0;
    for (std::size_t k = 0; k < tilde.amp_.size(); ++k) {
        const double w = std::norm(tilde.amp_[k]);
        const double p = tilde.grid_.p(k);
        m1 += p * w;
        m2 += p * p * w;
        den += w;
    }
    m1 /= den;
    m2 /= den;
    return m2 - m1 * m1;
}

cplx WaveFunction::momentum_amplitude_at(double p) const {
    if (rep_ != Rep::Position)
        throw std::invalid_argument("momentum_amplitude_at: position representation required");
    // Incremental phase rotation e^{-i p x_j}; renormalize the rotor
    // periodically to keep the recurrence stable.
    const double dx = grid_.dx();
    cplx rot{std::cos(-p * grid_.x_min()), std::sin(-p * grid_.x_min())};
    const cplx step{std::cos(-p * dx), std::sin(-p * dx)};
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < amp_.size(); ++j) {
        acc += amp_[j] * rot;
        rot *= step;
        if ((j & 1023u) == 1023u) rot /= std::abs(rot);
    }
    return acc * (dx / std::sqrt(2.0 * kPi));
}

Region Region::half_line() { return Region(Kind::HalfLinePositive, 0.0); }

Region Region::interval(double half_width) {
    if (!(half_width > 0.0))
        throw std::invalid_argument("Region: interval half-width must be positive");
    return Region(Kind::Interval, half_width);
}

double Region::chi(double x) const {
    const double tol = 1e-12 * (1.0 + std::abs(x) + half_width_);
    if (kind_ == Kind::HalfLinePositive) {
        if (std::abs(x) <= tol) return 0.5;
        return x > 0.0 ? 1.0 : 0.0;
    }
    if (std::abs(x - half_width_) <= tol || std::abs(x + half_width_) <= tol) return 0.5;
    return std::abs(x) < half_width_ ? 1.0 : 0.0;
}

double Region::exit_distance(double x0, double direction) const {
    const double far_edge = (kind_ == Kind::HalfLinePositive)
                                ? 0.0
                                : (direction < 0 ? -half_width_ : half_width_);
    return std::abs(x0 - far_edge);
}

WaveFunction gaussian_state(const Grid& grid, double x0, double p0, double sigma) {
    if (!(sigma >= 3.0 * grid.dx()))
        throw std::invalid_argument("gaussian_state: packet not resolvable (sigma < 3 dx)");
    if (x0 < grid.x_min() || x0 > grid.x_max())
        throw std::invalid_argument("gaussian_state: x0 outside grid");

    const double tail_left = erfc_tail(x0 - grid.x_min(), sigma);
    const double tail_right = erfc_tail(grid.x_max() - x0, sigma);
    if (tail_left + tail_right > 1e-10)
        throw std::invalid_argument("gaussian_state: position tail clipped at grid edge");

    // Momentum-space width is 1/(2 sigma); check against the momentum lattice edge.
    const double sigma_p = 1.0 / (2.0 * sigma);
    const double p_margin = grid.p_max() - std::abs(p0);
    if (p_margin <= 0.0 || erfc_tail(p_margin, sigma_p) > 1e-10)
        throw std::invalid_argument("gaussian_state: momentum tail clipped at lattice edge");

    std::vector<cplx> amp(grid.n());
    for (std::size_t j = 0; j < grid.n(); ++j) {
        const double x = grid.x(j);
        const double u = (x - x0) / (2.0 * sigma);
        const double mag = std::exp(-u * u);
        amp[j] = mag * cplx{std::cos(p0 * x), std::sin(p0 * x)};
    }
    WaveFunction psi(grid, Rep::Position, std::move(amp));
    const double n = psi.norm();
    for (cplx& a : psi.amplitudes_mut()) a /= n;
    return psi;
}

double probability_in_region(const WaveFunction& psi, const Region& region) {
    if (psi.rep() != Rep::Position)
        throw std::invalid_argument("probability_in_region: position representation required");
    double s = 0.0;
    for (std::size_t j = 0; j < psi.grid().n(); ++j)
        s += region.chi(psi.grid().x(j)) * std::norm(psi[j]);
    return s * psi.grid().dx();
}

double edge_probability(const WaveFunction& psi, std::size_t edge_points) {
    if (psi.rep() != Rep::Position)
        throw std::invalid_argument("edge_probability: position representation required");
    const std::size_t n = psi.grid().n();
    const std::size_t k = std::min(edge_points, n / 2);
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j)
        s += std::norm(psi[j]) + std::norm(psi[n - 1 - j]);
    return s * psi.grid().dx();
}

} // namespace chronoclock
