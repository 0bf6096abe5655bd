#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hdlab/errors.hpp"
#include "hdlab/quantum.hpp"
#include "hdlab/rng.hpp"

using namespace hdlab;
using quantum::QuadratureState;

namespace {

// independent responsivity oracle: eta = S * (hc/e in eV nm) / lambda_nm
double eta_pd_oracle(double s_a_per_w, double lambda_nm) {
    return s_a_per_w * 1239.8419843320026 / lambda_nm;
}

QuadratureState state_db(double sq, double anti, double angle = 0.0) {
    QuadratureState st;
    st.squeezing_db = sq;
    st.antisqueezing_db = anti;
    st.squeezing_angle = angle;
    return st;
}

}  // namespace

TEST_CASE("quadrature variance: vacuum is shot noise at every angle") {
    const auto vac = QuadratureState::vacuum();
    for (double theta : {0.0, 0.3, 1.0, 2.5, 3.14, 6.0}) {
        CHECK(quantum::quadrature_variance(vac, theta) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("quadrature variance: 3 dB state") {
    const auto st = state_db(-3.0102999566398120, 3.0102999566398120);
    CHECK(quantum::quadrature_variance(st, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    // (0.5 + 2) / 2 by direct evaluation at 45 degrees
    const double pi4 = std::atan(1.0);
    CHECK(quantum::quadrature_variance(st, pi4) == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("quadrature variance is pi periodic") {
    const rng::CounterStream u(7, 0);
    for (int i = 0; i < 200; ++i) {
        const double sq = -10.0 * u.uniform(4 * i);
        const auto st = state_db(sq, -sq + 3.0 * u.uniform(4 * i + 1),
                                 6.28 * u.uniform(4 * i + 2));
        const double theta = 12.0 * u.uniform(4 * i + 3) - 6.0;
        const double a = quantum::quadrature_variance(st, theta);
        const double b = quantum::quadrature_variance(st, theta + 3.14159265358979323846);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(a, b));
    }
}

TEST_CASE("state validation enforces the uncertainty bound") {
    CHECK_NOTHROW(state_db(-3.0, 3.0).validate());
    CHECK_NOTHROW(state_db(-3.0, 4.0).validate());  // impure is fine
    CHECK_THROWS_AS(state_db(-3.0, 2.0).validate(), DomainError);

    const rng::CounterStream u(11, 0);
    for (int i = 0; i < 100; ++i) {
        const double sq = -15.0 * u.uniform(2 * i);
        const auto st = state_db(sq, -sq + 5.0 * u.uniform(2 * i + 1));
        st.validate();
        CHECK(st.min_variance() * st.max_variance() >= 1.0 - 1e-12);
    }
}

TEST_CASE("apply_loss basics") {
    CHECK(quantum::apply_loss(0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(quantum::apply_loss(123.0, 0.0) == 1.0);
    CHECK(quantum::apply_loss(0.5, 0.5) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK_THROWS_AS(quantum::apply_loss(0.5, 1.5), DomainError);
    CHECK_THROWS_AS(quantum::apply_loss(0.5, -0.1), DomainError);
    CHECK_THROWS_AS(quantum::apply_loss(-1.0, 0.5), DomainError);
}

TEST_CASE("apply_loss: vacuum fixed point and contraction") {
    const rng::CounterStream u(3, 0);
    for (int i = 0; i < 200; ++i) {
        const double eta = u.uniform(2 * i);
        CHECK(quantum::apply_loss(1.0, eta) == 1.0);  // exact
        const double v = 0.01 + 10.0 * u.uniform(2 * i + 1);
        const double lost = quantum::apply_loss(v, eta);
        CHECK(std::abs(std::abs(lost - 1.0) - eta * std::abs(v - 1.0)) <=
              1e-15 * std::max(1.0, v));
    }
}

TEST_CASE("homodyne difference moments") {
    quantum::LocalOscillator lo;
    lo.amplitude = 7.0;
    lo.wavelength = 1.56e-6;

    SUBCASE("vacuum: variance |a|^2, zero mean") {
        auto [mean, var] = quantum::homodyne_difference_moments(lo, QuadratureState::vacuum(), 1.0);
        CHECK(mean == 0.0);
        CHECK(var == doctest::Approx(49.0).epsilon(1e-12));
    }
    SUBCASE("variance scales with |a|^2: doubling quadruples") {
        const auto st = state_db(-3.0, 3.5);
        auto [m1, v1] = quantum::homodyne_difference_moments(lo, st, 0.9);
        lo.amplitude = 14.0;
        auto [m2, v2] = quantum::homodyne_difference_moments(lo, st, 0.9);
        (void)m1;
        (void)m2;
        CHECK(v2 == doctest::Approx(4.0 * v1).epsilon(1e-12));
    }
    SUBCASE("loss composition: V=0.5, eta=0.8, |a|=10 gives 60") {
        lo.amplitude = 10.0;
        const auto st = state_db(10.0 * std::log10(0.5), 10.0 * std::log10(2.0));
        auto [mean, var] = quantum::homodyne_difference_moments(lo, st, 0.8);
        (void)mean;
        CHECK(var == doctest::Approx(60.0).epsilon(1e-9));
    }
    SUBCASE("displaced mean scales with sqrt(eta)") {
        auto st = QuadratureState::vacuum();
        st.mean_q = 2.0;
        lo.amplitude = 10.0;
        lo.phase = 0.0;
        auto [mean, var] = quantum::homodyne_difference_moments(lo, st, 0.25);
        (void)var;
        CHECK(mean == doctest::Approx(10.0 * 0.5 * 2.0).epsilon(1e-12));
    }
}

TEST_CASE("photodiode quantum efficiency") {
    // values anchored by the independent eV nm oracle
    CHECK(quantum::pd_quantum_efficiency(0.58, 795e-9) ==
          doctest::Approx(eta_pd_oracle(0.58, 795.0)).epsilon(1e-9));
    CHECK(quantum::pd_quantum_efficiency(0.58, 795e-9) == doctest::Approx(0.905).epsilon(1e-3));
    CHECK(quantum::pd_quantum_efficiency(0.95, 1550e-9) ==
          doctest::Approx(eta_pd_oracle(0.95, 1550.0)).epsilon(1e-9));
    CHECK(quantum::pd_quantum_efficiency(0.95, 1550e-9) == doctest::Approx(0.760).epsilon(1e-3));

    // unit-efficiency responsivity: S = lambda e / (h c)
    const double lambda = 1.0e-6;
    const double s_unit = lambda * constants::elementary_charge /
                          (constants::planck * constants::light_speed);
    CHECK(quantum::pd_quantum_efficiency(s_unit, lambda) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(quantum::pd_quantum_efficiency(2.0, 795e-9), DomainError);
    CHECK_THROWS_AS(quantum::pd_quantum_efficiency(-0.5, 795e-9), DomainError);
    CHECK_THROWS_AS(quantum::pd_quantum_efficiency(0.5, 0.0), DomainError);
}

TEST_CASE("electronic efficiency from clearance") {
    CHECK(quantum::electronic_efficiency_from_snc(18.0) == doctest::Approx(0.984).epsilon(5e-4));
    CHECK(quantum::electronic_efficiency_from_snc(15.0) ==
          doctest::Approx(0.9684).epsilon(5e-5));
    CHECK(quantum::electronic_efficiency_from_snc(12.0) ==
          doctest::Approx(0.936).epsilon(1.1e-3));
    CHECK(quantum::electronic_efficiency_from_snc(7.0) == doctest::Approx(0.801).epsilon(1e-3));
    CHECK(quantum::electronic_efficiency_from_snc(0.0) == 0.0);
    CHECK_THROWS_AS(quantum::electronic_efficiency_from_snc(-1.0), DomainError);
}

TEST_CASE("clearance map is strictly increasing and invertible") {
    double prev = -1.0;
    for (double snc = 0.0; snc <= 40.0; snc += 0.25) {
        const double eta = quantum::electronic_efficiency_from_snc(snc);
        CHECK(eta > prev);
        prev = eta;
        if (snc > 0.0) {
            const double round = quantum::snc_from_electronic_efficiency(eta);
            CHECK(std::abs(round - snc) <= 1e-9 * snc);
        }
    }
}

TEST_CASE("total efficiency") {
    CHECK(quantum::total_efficiency(quantum::EfficiencyBudget::make(1, 1, 1)) == 1.0);
    CHECK(quantum::total_efficiency(quantum::EfficiencyBudget::make(1.0, 0.905, 0.984)) ==
          doctest::Approx(0.806).epsilon(1e-3));
    CHECK(quantum::total_efficiency(quantum::EfficiencyBudget::make(0.9, 0.760, 0.9684)) ==
          doctest::Approx(0.503).epsilon(1e-3));
    CHECK_THROWS_AS(quantum::EfficiencyBudget::make(1.2, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(quantum::EfficiencyBudget::make(1.0, -0.1, 1.0), DomainError);

    const auto b = quantum::EfficiencyBudget::make(0.9, 0.76, 0.9684);
    CHECK(b.eta_total == b.eta_mod * b.eta_pd * b.eta_pd * b.eta_elec);  // exact structure
}
