#include "chronoclock/lattice.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace chronoclock;

TEST_CASE("grid construction and momentum lattice") {
    const Grid g = Grid::make(-10.0, 10.0, 4);
    CHECK(g.dx() == doctest::Approx(5.0));
    CHECK(g.dp() == doctest::Approx(2.0 * oracles::kPi / 20.0));
    CHECK(g.x(0) == doctest::Approx(-10.0));
    CHECK(g.x(3) == doctest::Approx(5.0));
    // standard DFT ordering: 0, dp, -2dp, -dp
    CHECK(g.p(0) == doctest::Approx(0.0));
    CHECK(g.p(1) == doctest::Approx(g.dp()));
    CHECK(g.p(2) == doctest::Approx(-2.0 * g.dp()));
    CHECK(g.p(3) == doctest::Approx(-g.dp()));

    const Grid fine = Grid::make(-100.0, 100.0, 2048);
    CHECK(fine.dx() == doctest::Approx(0.09765625));

    CHECK_THROWS(Grid::make(0.0, 1.0, 3));    // not a power of two
    CHECK_THROWS(Grid::make(1.0, 1.0, 4));    // degenerate extent
    CHECK_THROWS(Grid::make(2.0, 1.0, 4));
}

TEST_CASE("gaussian state normalization and moments") {
    const Grid g = Grid::make(-60.0, 60.0, 2048);
    const WaveFunction psi = gaussian_state(g, 15.0, -3.0, 2.0);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(psi.mean_x() == doctest::Approx(15.0).epsilon(1e-8));
    CHECK(psi.mean_p() == doctest::Approx(-3.0).epsilon(1e-6));
    // momentum variance 1/(4 sigma^2)
    CHECK(psi.variance_p() == doctest::Approx(0.0625).epsilon(1e-6));

    // quadrature oracle for the same moments: direct lattice sums over the
    // transformed amplitudes
    double num_p = 0.0, num_p2 = 0.0, den = 0.0;
    const WaveFunction tilde = psi.to(Rep::Momentum);
    for (std::size_t k = 0; k < g.n(); ++k) {
        const double p = g.p(k);
        const double w = std::norm(tilde[k]);
        num_p += p * w;
        num_p2 += p * p * w;
        den += w;
    }
    CHECK(num_p / den == doctest::Approx(-3.0).epsilon(1e-6));
    CHECK(num_p2 / den - 9.0 == doctest::Approx(0.0625).epsilon(1e-4));

    CHECK_THROWS(gaussian_state(g, 15.0, -3.0, 0.5 * g.dx()));   // unresolvable
    CHECK_THROWS(gaussian_state(g, 59.0, -3.0, 2.0));            // tail clipped
    CHECK_THROWS(gaussian_state(g, 200.0, -3.0, 2.0));           // outside grid
}

TEST_CASE("transform involution and Parseval") {
    const Grid g = Grid::make(-40.0, 40.0, 1024);
    const WaveFunction psi = gaussian_state(g, 5.0, 2.0, 1.5);

    const WaveFunction back = psi.transformed().transformed();
    double max_err = 0.0;
    for (std::size_t j = 0; j < g.n(); ++j)
        max_err = std::max(max_err, std::abs(back[j] - psi[j]));
    CHECK(max_err < 1e-12);

    CHECK(psi.transformed().norm() == doctest::Approx(psi.norm()).epsilon(1e-12));

    // gaussian at rest transforms to a gaussian of width 1/(2 sigma)
    const double sigma = 2.5;
    const WaveFunction rest = gaussian_state(g, 0.0, 0.0, sigma);
    CHECK(rest.variance_p() == doctest::Approx(1.0 / (4.0 * sigma * sigma)).epsilon(1e-8));
}

TEST_CASE("Parseval holds for random states") {
    const Grid g = Grid::make(-20.0, 20.0, 256);
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<cplx> amp(g.n());
        for (auto& a : amp)
            a = cplx{oracles::uniform01(rng) - 0.5, oracles::uniform01(rng) - 0.5};
        const WaveFunction psi(g, Rep::Position, std::move(amp));
        const WaveFunction tilde = psi.transformed();
        CHECK(std::abs(tilde.norm_squared() - psi.norm_squared()) <
              1e-12 * psi.norm_squared());
    }
}

TEST_CASE("spectral mean momentum agrees with finite differences to O(dx^2)") {
    auto fd_mean_p = [](const WaveFunction& psi) {
        const Grid& g = psi.grid();
        double num = 0.0;
        for (std::size_t j = 1; j + 1 < g.n(); ++j) {
            const cplx d = (psi[j + 1] - psi[j - 1]) / (2.0 * g.dx());
            num += std::imag(std::conj(psi[j]) * d); // <p> = Im int psi* psi'
        }
        return num * g.dx() / psi.norm_squared();
    };
    const double p0 = -2.0;
    const Grid g1 = Grid::make(-30.0, 30.0, 512);
    const Grid g2 = Grid::make(-30.0, 30.0, 1024);
    const double e1 = std::abs(fd_mean_p(gaussian_state(g1, 0.0, p0, 3.0)) - p0);
    const double e2 = std::abs(fd_mean_p(gaussian_state(g2, 0.0, p0, 3.0)) - p0);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25)); // O(dx^2)
    CHECK(std::abs(gaussian_state(g1, 0.0, p0, 3.0).mean_p() - p0) < 1e-9);
}

TEST_CASE("grid refinement leaves gaussian moments unchanged once resolved") {
    const Grid coarse = Grid::make(-50.0, 50.0, 1024); // sigma = 2 > 6 dx
    const Grid fine = Grid::make(-50.0, 50.0, 2048);
    const WaveFunction a = gaussian_state(coarse, 3.0, -1.0, 2.0);
    const WaveFunction b = gaussian_state(fine, 3.0, -1.0, 2.0);
    CHECK(std::abs(a.mean_x() - b.mean_x()) < 1e-8);
    CHECK(std::abs(a.mean_p() - b.mean_p()) < 1e-8);
    CHECK(std::abs(a.variance_p() - b.variance_p()) < 1e-8);
}

TEST_CASE("region characteristic function with the midpoint convention") {
    const Region half = Region::half_line();
    CHECK(half.chi(1.0) == 1.0);
    CHECK(half.chi(-1.0) == 0.0);
    CHECK(half.chi(0.0) == 0.5);

    const Region box = Region::interval(5.0);
    CHECK(box.chi(0.0) == 1.0);
    CHECK(box.chi(4.999) == 1.0);
    CHECK(box.chi(5.0) == 0.5);
    CHECK(box.chi(-5.0) == 0.5);
    CHECK(box.chi(5.001) == 0.0);
    CHECK_THROWS(Region::interval(-1.0));

    // x = 0 lands exactly on the lattice of a symmetric power-of-two grid
    const Grid g = Grid::make(-60.0, 60.0, 4096);
    CHECK(half.chi(g.x(2048)) == 0.5);
}

TEST_CASE("probability in region") {
    const Grid g = Grid::make(-60.0, 60.0, 2048);
    const Region half = Region::half_line();

    CHECK(probability_in_region(gaussian_state(g, 20.0, 0.0, 2.0), half) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(probability_in_region(gaussian_state(g, -20.0, 0.0, 2.0), half) ==
          doctest::Approx(0.0).epsilon(1e-9));

    // packet centered on an interval edge covers half its mass
    const Region box = Region::interval(5.0);
    const WaveFunction edge = gaussian_state(g, 5.0, 0.0, 2.0);
    const double p = probability_in_region(edge, box);
    const double erf_oracle =
        0.5 * std::erf(10.0 / (std::sqrt(2.0) * 2.0 * std::sqrt(2.0)));
    CHECK(p == doctest::Approx(0.5).epsilon(0.01));
    CHECK(p == doctest::Approx(erf_oracle).epsilon(0.01));

    CHECK_THROWS(probability_in_region(edge.to(Rep::Momentum), box));
}

TEST_CASE("band-limited momentum amplitude matches the lattice transform") {
    const Grid g = Grid::make(-40.0, 40.0, 512);
    const WaveFunction psi = gaussian_state(g, 2.0, -1.0, 3.0);
    const WaveFunction tilde = psi.to(Rep::Momentum);
    for (std::size_t k : {10u, 100u, 300u}) {
        const cplx direct = psi.momentum_amplitude_at(g.p(k));
        CHECK(std::abs(direct - tilde[k]) < 1e-10);
    }
}
