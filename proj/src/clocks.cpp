#include "chronoclock/clocks.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace chronoclock {

namespace {

constexpr double kPi = std::numbers::pi;

struct LatticeChannel {
    double eps;
    std::size_t k; // momentum lattice index
    double mass;   // |w|^2 * d_eps
};

// Keep the smallest contiguous momentum-index window (in signed-p order)
// whose weight mass reaches the target. Contiguity keeps the kept spectrum
// an interval, which the channel decomposition assumes.
std::vector<std::size_t> keep_contiguous(const Grid& g, const std::vector<double>& mass,
                                         double target) {
    const std::size_t n = g.n();
    std::vector<std::size_t> order(n); // lattice indices in ascending-p order
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return g.p(a) < g.p(b); });

    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (mass[order[i]] > mass[order[peak]]) peak = i;

    std::size_t lo = peak, hi = peak;
    double kept = mass[order[peak]];
    while (kept < target && (lo > 0 || hi + 1 < n)) {
        const double left = lo > 0 ? mass[order[lo - 1]] : -1.0;
        const double right = hi + 1 < n ? mass[order[hi + 1]] : -1.0;
        if (left >= right) {
            --lo;
            kept += mass[order[lo]];
        } else {
            ++hi;
            kept += mass[order[hi]];
        }
    }
    return {order.begin() + static_cast<std::ptrdiff_t>(lo),
            order.begin() + static_cast<std::ptrdiff_t>(hi) + 1};
}

std::vector<cplx> plane_wave(const Grid& g, double eps) {
    // e^{i eps y} / sqrt(extent): lattice-normalized and real-positive at y=0.
    std::vector<cplx> u(g.n());
    const double a = 1.0 / std::sqrt(g.extent());
    for (std::size_t j = 0; j < g.n(); ++j) {
        const double ph = eps * g.x(j);
        u[j] = a * cplx{std::cos(ph), std::sin(ph)};
    }
    return u;
}

} // namespace

double ClockModel::potential_at(double y) const {
    return potential_ ? potential_(y) : 0.0;
}

ClockModel ClockModel::linear_momentum(const WaveFunction& phi0, double truncation_deficit) {
    ClockModel c(Kind::LinearMomentum, phi0.to(Rep::Position), 0.0);
    const Grid& g = c.ygrid();
    const WaveFunction tilde = phi0.to(Rep::Momentum);

    std::vector<double> mass(g.n());
    for (std::size_t k = 0; k < g.n(); ++k) mass[k] = std::norm(tilde[k]) * g.dp();

    const auto kept = keep_contiguous(g, mass, 1.0 - truncation_deficit);
    c.measure_ = g.dp();
    double total = 0.0;
    for (std::size_t k : kept) {
        c.eps_.push_back(g.p(k));
        c.weights_.push_back(tilde[k]);
        c.funcs_.push_back(plane_wave(g, g.p(k)));
        total += mass[k];
    }
    c.deficit_ = 1.0 - total;
    return c;
}

ClockModel ClockModel::free_particle(const WaveFunction& phi0, double mu,
                                     double truncation_deficit) {
    if (!(mu > 0.0)) throw std::invalid_argument("ClockModel: mu must be positive");
    ClockModel c(Kind::FreeParticle, phi0.to(Rep::Position), mu);
    const Grid& g = c.ygrid();
    const WaveFunction tilde = phi0.to(Rep::Momentum);

    std::vector<double> mass(g.n());
    for (std::size_t k = 0; k < g.n(); ++k) mass[k] = std::norm(tilde[k]) * g.dp();

    // Momentum plane waves diagonalize p^2/2mu; eigenvalues p^2/2mu are
    // doubly degenerate but the channels stay distinct in p.
    auto kept = keep_contiguous(g, mass, 1.0 - truncation_deficit);
    std::sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
        const double ea = g.p(a) * g.p(a), eb = g.p(b) * g.p(b);
        if (ea != eb) return ea < eb;
        return g.p(a) < g.p(b);
    });
    c.measure_ = g.dp();
    double total = 0.0;
    for (std::size_t k : kept) {
        const double p = g.p(k);
        c.eps_.push_back(p * p / (2.0 * mu));
        c.weights_.push_back(tilde[k]);
        c.funcs_.push_back(plane_wave(g, p));
        total += mass[k];
    }
    c.deficit_ = 1.0 - total;
    return c;
}

ClockModel ClockModel::potential_well(const WaveFunction& phi0, double mu,
                                      const std::function<double(double)>& potential,
                                      double truncation_deficit) {
    if (!(mu > 0.0)) throw std::invalid_argument("ClockModel: mu must be positive");
    if (!potential) throw std::invalid_argument("ClockModel: potential required");
    ClockModel c(Kind::PotentialWell, phi0.to(Rep::Position), mu);
    c.potential_ = potential;
    const Grid& g = c.ygrid();
    const std::size_t n = g.n();
    if (n > 2048)
        throw std::invalid_argument("ClockModel: potential_well grid too large to diagonalize");

    // Finite-difference Hamiltonian with Dirichlet ends; the well confines
    // the relevant states away from the boundary.
    const double dy = g.dx();
    const double kin = 1.0 / (2.0 * mu * dy * dy);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) {
        h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) =
            2.0 * kin + potential(g.x(j));
        if (j + 1 < n) {
            h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j + 1)) = -kin;
            h(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(j)) = -kin;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("ClockModel: eigensolver failed");

    // Reference index for the phase convention.
    std::size_t j0 = 0;
    double best = std::numeric_limits<double>::max();
    for (std::size_t j = 0; j < n; ++j) {
        const double d = std::abs(g.x(j));
        if (d < best) { best = d; j0 = j; }
    }

    const auto& phi = c.phi0_;
    struct Cand { double eps; std::vector<cplx> u; cplx w; double mass; };
    std::vector<Cand> cands(n);
    const double inv_sqrt_dy = 1.0 / std::sqrt(dy);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(i));
        double ref = v(static_cast<Eigen::Index>(j0));
        if (std::abs(ref) < 1e-8) {
            Eigen::Index arg = 0;
            v.cwiseAbs().maxCoeff(&arg);
            ref = v(arg);
        }
        if (ref < 0.0) v = -v;

        Cand cand;
        cand.eps = solver.eigenvalues()(static_cast<Eigen::Index>(i));
        cand.u.resize(n);
        cplx w{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            cand.u[j] = v(static_cast<Eigen::Index>(j)) * inv_sqrt_dy;
            w += std::conj(cand.u[j]) * phi[j];
        }
        cand.w = w * dy;
        cand.mass = std::norm(cand.w);
        cands[i] = std::move(cand);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return cands[a].mass > cands[b].mass; });
    double kept = 0.0;
    std::vector<std::size_t> keep;
    for (std::size_t i : order) {
        if (kept >= 1.0 - truncation_deficit) break;
        keep.push_back(i);
        kept += cands[i].mass;
    }
    std::sort(keep.begin(), keep.end(),
              [&](std::size_t a, std::size_t b) { return cands[a].eps < cands[b].eps; });

    c.measure_ = 1.0;
    for (std::size_t i : keep) {
        c.eps_.push_back(cands[i].eps);
        c.weights_.push_back(cands[i].w);
        c.funcs_.push_back(std::move(cands[i].u));
    }
    c.deficit_ = 1.0 - kept;
    return c;
}

double ClockModel::eps_mean() const {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < eps_.size(); ++i) {
        const double w = std::norm(weights_[i]) * measure_;
        num += eps_[i] * w;
        den += w;
    }
    return num / den;
}

double ClockModel::eps_std() const {
    const double mean = eps_mean();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < eps_.size(); ++i) {
        const double w = std::norm(weights_[i]) * measure_;
        num += (eps_[i] - mean) * (eps_[i] - mean) * w;
        den += w;
    }
    return std::sqrt(std::max(0.0, num / den));
}

std::vector<cplx> clock_response(const ClockModel& clock, double lambda, double t) {
    if (clock.truncation_deficit() > 1e-8)
        throw std::invalid_argument("clock_response: eigensystem truncation deficit exceeds 1e-8");
    const std::size_t ny = clock.ygrid().n();
    std::vector<cplx> phi(ny, cplx{0.0, 0.0});
    const double sqrt_measure = std::sqrt(clock.measure());
    for (std::size_t i = 0; i < clock.n_channels(); ++i) {
        const double ph = -lambda * clock.eigenvalue(i) * t;
        const cplx coeff = clock.weight(i) * sqrt_measure * cplx{std::cos(ph), std::sin(ph)};
        const auto u = clock.eigenfunction(i);
        for (std::size_t j = 0; j < ny; ++j) phi[j] += coeff * u[j];
    }
    // sum_j |phi|^2 dy = sum |w|^2 measure = 1 up to the truncation deficit.
    return phi;
}

cplx resolution_overlap(const ClockModel& clock, double lambda, double delta_t) {
    cplx acc{0.0, 0.0};
    double mass = 0.0;
    for (std::size_t i = 0; i < clock.n_channels(); ++i) {
        const double w = std::norm(clock.weight(i)) * clock.measure();
        const double ph = -lambda * clock.eigenvalue(i) * delta_t;
        acc += w * cplx{std::cos(ph), std::sin(ph)};
        mass += w;
    }
    return acc / mass;
}

double resolution_time(const ClockModel& clock, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("resolution_time: lambda must be positive");
    const double sigma = clock.eps_std();
    const double scale = std::abs(clock.eps_mean()) + 1.0;
    if (sigma < 1e-12 * scale) return std::numeric_limits<double>::infinity();
    return 1.0 / (lambda * sigma);
}

namespace {

// Cumulative action integral of k(y) = sqrt(2 mu (eps - U)) from the grid
// point nearest y=0, over the allowed interval containing it. Cells that
// straddle a turning point use the sqrt-cell form int dy k ~ (2/3) k_in * dy_in.
struct ActionTable {
    std::vector<double> S;       // NaN outside
    std::vector<double> k;       // sqrt(2 mu (eps-U)), NaN outside
    std::size_t lo = 0, hi = 0;  // allowed index range [lo, hi]
    std::vector<double> turning; // interpolated turning points
};

ActionTable action_table(const Grid& g, std::span<const double> U, double mu, double eps) {
    const std::size_t n = g.n();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    ActionTable t;
    t.S.assign(n, nan);
    t.k.assign(n, nan);

    std::size_t j0 = 0;
    double best = std::numeric_limits<double>::max();
    for (std::size_t j = 0; j < n; ++j) {
        const double d = std::abs(g.x(j));
        if (d < best) { best = d; j0 = j; }
    }
    if (!(eps > U[j0]))
        throw std::invalid_argument("wkb: epsilon not above the potential at the reference point");

    auto ksq = [&](std::size_t j) { return 2.0 * mu * (eps - U[j]); };

    std::size_t lo = j0, hi = j0;
    while (lo > 0 && ksq(lo - 1) > 0.0) --lo;
    while (hi + 1 < n && ksq(hi + 1) > 0.0) ++hi;
    t.lo = lo;
    t.hi = hi;
    for (std::size_t j = lo; j <= hi; ++j) t.k[j] = std::sqrt(ksq(j));

    // Turning points by linear interpolation of k^2 across the sign change.
    if (lo > 0) {
        const double a = ksq(lo - 1), b = ksq(lo);
        t.turning.push_back(g.x(lo - 1) + g.dx() * a / (a - b));
    }
    if (hi + 1 < n) {
        const double a = ksq(hi), b = ksq(hi + 1);
        t.turning.push_back(g.x(hi) + g.dx() * a / (a - b));
    }
    std::sort(t.turning.begin(), t.turning.end());

    t.S[j0] = 0.0;
    for (std::size_t j = j0; j < hi; ++j)
        t.S[j + 1] = t.S[j] + 0.5 * (t.k[j] + t.k[j + 1]) * g.dx();
    for (std::size_t j = j0; j > lo; --j)
        t.S[j - 1] = t.S[j] - 0.5 * (t.k[j] + t.k[j - 1]) * g.dx();
    return t;
}

double interp(const Grid& g, std::span<const double> f, std::size_t lo, std::size_t hi,
              double y, const char* what) {
    if (y < g.x(lo) || y > g.x(hi))
        throw std::invalid_argument(std::string(what) + ": point outside the allowed interval");
    const double u = (y - g.x_min()) / g.dx();
    auto j = static_cast<std::size_t>(u);
    if (j >= hi) j = hi - 1;
    if (j < lo) j = lo;
    const double w = u - static_cast<double>(j);
    return f[j] * (1.0 - w) + f[j + 1] * w;
}

} // namespace

bool WKBEigenstate::allowed(std::size_t j) const {
    return j < action.size() && !std::isnan(action[j]);
}

double WKBEigenstate::action_at(double y) const {
    if (exact_plane_wave) return epsilon * y;
    std::size_t lo = 0, hi = action.size() - 1;
    while (lo < action.size() && std::isnan(action[lo])) ++lo;
    while (hi > 0 && std::isnan(action[hi])) --hi;
    return interp(ygrid, action, lo, hi, y, "action_at");
}

double WKBEigenstate::amplitude_at(double y) const {
    if (exact_plane_wave) return 1.0 / std::sqrt(2.0 * kPi);
    std::size_t lo = 0, hi = amplitude.size() - 1;
    while (lo < amplitude.size() && std::isnan(amplitude[lo])) ++lo;
    while (hi > 0 && std::isnan(amplitude[hi])) --hi;
    return interp(ygrid, amplitude, lo, hi, y, "amplitude_at");
}

WKBEigenstate wkb_eigenstate(const ClockModel& clock, double epsilon) {
    WKBEigenstate w;
    w.epsilon = epsilon;
    w.mu = clock.mu();
    w.ygrid = clock.ygrid();

    if (clock.kind() == ClockModel::Kind::LinearMomentum) {
        // Plane-wave phase, treated exactly.
        w.exact_plane_wave = true;
        const std::size_t n = w.ygrid.n();
        w.potential.assign(n, 0.0);
        w.action.resize(n);
        w.amplitude.assign(n, 1.0 / std::sqrt(2.0 * kPi));
        for (std::size_t j = 0; j < n; ++j) w.action[j] = epsilon * w.ygrid.x(j);
        return w;
    }

    const std::size_t n = w.ygrid.n();
    w.potential.resize(n);
    double umin = std::numeric_limits<double>::max();
    for (std::size_t j = 0; j < n; ++j) {
        w.potential[j] = clock.potential_at(w.ygrid.x(j));
        umin = std::min(umin, w.potential[j]);
    }
    if (!(epsilon > umin))
        throw std::invalid_argument("wkb_eigenstate: epsilon below the potential minimum");

    const ActionTable t = action_table(w.ygrid, w.potential, w.mu, epsilon);
    w.action = t.S;
    w.turning_points = t.turning;

    // C ~ k^{-1/2}, normalized over the allowed interval. Cells adjoining a
    // turning point are integrated with the local sqrt form of k^2.
    const double dy = w.ygrid.dx();
    double inv_norm = 0.0;
    for (std::size_t j = t.lo; j < t.hi; ++j)
        inv_norm += 0.5 * (1.0 / t.k[j] + 1.0 / t.k[j + 1]) * dy;
    if (t.lo > 0) {
        const double edge = w.ygrid.x(t.lo) - t.turning.front();
        inv_norm += 2.0 * edge / t.k[t.lo];
    }
    if (t.hi + 1 < n && !t.turning.empty()) {
        const double edge = t.turning.back() - w.ygrid.x(t.hi);
        inv_norm += 2.0 * edge / t.k[t.hi];
    }
    const double a = 1.0 / std::sqrt(inv_norm);
    w.amplitude.assign(n, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t j = t.lo; j <= t.hi; ++j) w.amplitude[j] = a / std::sqrt(t.k[j]);
    return w;
}

double hj_time_map(const WKBEigenstate& wkb, double lambda, double y) {
    if (lambda == 0.0) throw std::invalid_argument("hj_time_map: lambda must be nonzero");
    if (wkb.exact_plane_wave) return y / lambda;

    const double deps = 1e-4 * std::abs(wkb.epsilon);
    if (deps <= 0.0)
        throw std::invalid_argument("hj_time_map: finite-difference step underflow");

    const ActionTable up =
        action_table(wkb.ygrid, wkb.potential, wkb.mu, wkb.epsilon + deps);
    const ActionTable dn =
        action_table(wkb.ygrid, wkb.potential, wkb.mu, wkb.epsilon - deps);
    const double s_up = interp(wkb.ygrid, up.S, up.lo, up.hi, y, "hj_time_map");
    const double s_dn = interp(wkb.ygrid, dn.S, dn.lo, dn.hi, y, "hj_time_map");
    return (s_up - s_dn) / (2.0 * deps * lambda);
}

} // namespace chronoclock
