#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "hdlab/circuit.hpp"
#include "hdlab/errors.hpp"
#include "hdlab/rng.hpp"

using namespace hdlab;
using circuit::TiaConfig;

namespace {

const auto kCatalog = components::Catalog::builtin();

TiaConfig make_tia(const std::string& oa, const std::string& pd, double r_f, double c_f) {
    TiaConfig t;
    t.opamp = kCatalog.opamp(oa);
    t.photodiode = kCatalog.photodiode(pd);
    t.feedback_resistance_ohm = r_f;
    t.feedback_capacitance_f = c_f;
    return t;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> g(n);
    const double r = std::log(hi / lo) / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::exp(r * double(i));
    return g;
}

}  // namespace

TEST_CASE("cutoff estimate matches direct evaluation") {
    // wideband NIR configuration: 620 ohm, 1 pF, s3883
    const auto wide = make_tia("OPA856", "s3883", 620.0, 1e-12);
    const double c_tot = 1e-12 + 2 * 6e-12 + 1.1e-12;
    const double oracle = std::sqrt(1.1e9 / (2.0 * constants::pi * 620.0 * c_tot));
    CHECK(circuit::tia_cutoff(wide) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(circuit::tia_cutoff(wide) == doctest::Approx(1.41514e8).epsilon(1e-4));
    CHECK(circuit::tia_cutoff(wide) > 100e6);  // stays above the repetition band

    const auto narrow = make_tia("OPA856", "s3883", 1500.0, 1.5e-12);
    CHECK(circuit::tia_cutoff(narrow) == doctest::Approx(8.94097e7).epsilon(1e-4));
}

TEST_CASE("cutoff scaling: quadrupling R_F halves the cutoff") {
    auto t = make_tia("OPA856", "s3883", 620.0, 1e-12);
    const double f1 = circuit::tia_cutoff(t);
    t.feedback_resistance_ohm *= 4.0;
    CHECK(circuit::tia_cutoff(t) == doctest::Approx(0.5 * f1).epsilon(1e-12));
}

TEST_CASE("feedback capacitance design values") {
    const auto& opa856 = kCatalog.opamp("OPA856");
    const auto& opa855 = kCatalog.opamp("OPA855");
    const auto& s3883 = kCatalog.photodiode("s3883");

    const double c1 = circuit::design_feedback_capacitance(opa856, s3883, 1500.0);
    CHECK(c1 == doctest::Approx(1.58972e-12).epsilon(1e-4));
    CHECK(c1 > 1.5e-12);
    CHECK(c1 < 1.7e-12);

    const double c2 = circuit::design_feedback_capacitance(opa855, s3883, 1500.0);
    CHECK(c2 == doctest::Approx(5.82694e-13).epsilon(1e-4));

    const double c_quarter = circuit::design_feedback_capacitance(opa856, s3883, 6000.0);
    CHECK(c_quarter == doctest::Approx(0.5 * c1).epsilon(1e-12));

    CHECK_THROWS_AS(circuit::design_feedback_capacitance(opa856, s3883, 0.0), DomainError);
}

TEST_CASE("design/cutoff forms stay consistent at random parameter sets") {
    const rng::CounterStream u(17, 0);
    for (int i = 0; i < 5; ++i) {
        components::OpAmpSpec oa{"probe", 0.5e9 + 9.5e9 * u.uniform(4 * i),
                                 0.5e-12 + 4.5e-12 * u.uniform(4 * i + 1), 1.0, 1e9};
        components::PhotodiodeSpec pd{"probe_pd", 0.5, 1e-6,
                                      0.5e-12 + 9.5e-12 * u.uniform(4 * i + 2), 1e9, 1e-3};
        const double r = 100.0 + 4900.0 * u.uniform(4 * i + 3);

        const double cf_r = circuit::design_feedback_capacitance(oa, pd, r);
        const double cf_4r = circuit::design_feedback_capacitance(oa, pd, 4.0 * r);
        CHECK(cf_4r == doctest::Approx(0.5 * cf_r).epsilon(1e-12));

        TiaConfig t{oa, pd, r, cf_r, 3.3};
        TiaConfig t4{oa, pd, 4.0 * r, cf_4r, 3.3};
        const double ratio = circuit::tia_cutoff(t4) / circuit::tia_cutoff(t);
        const double predicted =
            std::sqrt(t.total_capacitance_f() / (4.0 * t4.total_capacitance_f()));
        CHECK(ratio == doctest::Approx(predicted).epsilon(1e-12));
    }
}

TEST_CASE("transimpedance: DC gain and natural frequency") {
    const auto t = make_tia("OPA856", "s3883", 1500.0, 1.5e-12);
    CHECK(std::abs(circuit::tia_transfer(t, 0.0)) == t.feedback_resistance_ohm);

    // extract the second-order coefficient numerically: Re(R/Z) = 1 - b w^2
    const double f1 = 20e6;
    const std::complex<double> inv = t.feedback_resistance_ohm / circuit::tia_transfer(t, f1);
    const double w1 = 2.0 * constants::pi * f1;
    const double b = (1.0 - inv.real()) / (w1 * w1);
    const double f_nat = 1.0 / (2.0 * constants::pi * std::sqrt(b));
    CHECK(f_nat == doctest::Approx(circuit::tia_cutoff(t)).epsilon(1e-9));
}

TEST_CASE("uncompensated feedback peaks above DC") {
    const auto t = make_tia("OPA856", "s3883", 620.0, 0.0);
    const double dc = std::abs(circuit::tia_transfer(t, 0.0));
    double peak = 0.0;
    for (double f : log_grid(1e6, 2e9, 600)) {
        peak = std::max(peak, std::abs(circuit::tia_transfer(t, f)));
    }
    CHECK(peak > dc);

    const auto bode = circuit::bode_analysis(t, log_grid(1e6, 2e9, 600));
    CHECK(bode.peaking_db > 0.5);
}

TEST_CASE("designed compensation keeps the response flat") {
    for (const char* pd : {"s3883", "FGA015"}) {
        for (double r : {620.0, 1200.0, 1500.0}) {
            auto t = make_tia("OPA856", pd, r, 0.0);
            t.feedback_capacitance_f =
                circuit::design_feedback_capacitance(t.opamp, t.photodiode, r);
            const auto bode = circuit::bode_analysis(t, log_grid(1e6, 4e9, 800));
            CHECK(bode.peaking_db <= 0.5);
            REQUIRE(bode.f_3db_hz.has_value());
            // model bandwidth against the closed-form estimate
            const double est = circuit::tia_cutoff(t);
            CHECK(std::abs(*bode.f_3db_hz - est) <= 0.25 * est);
        }
    }
}

TEST_CASE("model bandwidth tracks the estimate across the catalog") {
    for (const auto& oa : kCatalog.opamps) {
        for (const char* pd : {"s3883", "FGA015"}) {
            for (double r : {620.0, 1200.0, 1500.0}) {
                auto t = make_tia(oa.name, pd, r, 0.0);
                t.feedback_capacitance_f =
                    circuit::design_feedback_capacitance(t.opamp, t.photodiode, r);
                const auto bode = circuit::bode_analysis(t, log_grid(1e6, 8e9, 1000));
                REQUIRE(bode.f_3db_hz.has_value());
                CHECK(std::abs(*bode.f_3db_hz - circuit::tia_cutoff(t)) <=
                      0.25 * circuit::tia_cutoff(t));
            }
        }
    }
}

TEST_CASE("bandwidth falls as C_F grows past the designed value") {
    auto t = make_tia("OPA856", "s3883", 620.0, 0.0);
    const double designed = circuit::design_feedback_capacitance(t.opamp, t.photodiode, 620.0);
    double prev = 1e12;
    for (double c_f : {designed, 2e-12, 4e-12, 7e-12, 10e-12}) {
        t.feedback_capacitance_f = c_f;
        const auto bode = circuit::bode_analysis(t, log_grid(1e5, 2e9, 900));
        REQUIRE(bode.f_3db_hz.has_value());
        CHECK(*bode.f_3db_hz < prev);
        prev = *bode.f_3db_hz;
    }
}

TEST_CASE("bode grid validation and unresolved cutoff") {
    const auto t = make_tia("OPA856", "s3883", 1500.0, 1.5e-12);
    CHECK_THROWS_AS(circuit::bode_analysis(t, {1.0, 2.0}), DomainError);

    // grid that never reaches -3 dB: explicit empty result, no crash
    const auto bode = circuit::bode_analysis(t, log_grid(1e3, 1e6, 32));
    CHECK_FALSE(bode.f_3db_hz.has_value());
}

TEST_CASE("subtraction and conversion") {
    const double fs = 1e9;
    auto t = make_tia("OPA856", "s3883", 1500.0, 1.59e-12);

    SUBCASE("balanced inputs cancel exactly") {
        std::vector<double> i(4000, 3.3e-4);
        const auto out = circuit::subtract_and_convert(i, i, t, fs);
        for (double v : out.samples) CHECK(v == 0.0);
        CHECK(out.clipped == 0);
    }
    SUBCASE("a 1 uA step settles to R_F * i") {
        std::vector<double> i1(4000, 0.0), i2(4000, 1e-6);
        const auto out = circuit::subtract_and_convert(i1, i2, t, fs);
        CHECK(out.samples.back() == doctest::Approx(1.5e-3).epsilon(1e-9));
        CHECK(out.clipped == 0);
    }
    SUBCASE("currents beyond rail/R_F clip flat at the rail") {
        std::vector<double> i1(4000, 0.0), i2(4000, 2.0 * t.rail_voltage_v /
                                                        t.feedback_resistance_ohm);
        const auto out = circuit::subtract_and_convert(i1, i2, t, fs);
        CHECK(out.samples.back() == t.rail_voltage_v);
        CHECK(out.clipped > 0);
    }
    SUBCASE("length mismatch is a shape error") {
        std::vector<double> i1(100, 0.0), i2(101, 0.0);
        CHECK_THROWS_AS(circuit::subtract_and_convert(i1, i2, t, fs), ShapeError);
    }
    SUBCASE("linear below the rails") {
        std::vector<double> i1(3000, 0.0), i2(3000, 0.0);
        const rng::CounterStream u(5, 0);
        for (std::size_t k = 0; k < i2.size(); ++k) {
            i2[k] = 2e-6 * (u.uniform(k) - 0.5);
        }
        const auto base = circuit::subtract_and_convert(i1, i2, t, fs);
        std::vector<double> scaled = i2;
        for (double& v : scaled) v *= 3.0;
        const auto big = circuit::subtract_and_convert(i1, scaled, t, fs);
        for (std::size_t k = 0; k < base.samples.size(); ++k) {
            CHECK(std::abs(big.samples[k] - 3.0 * base.samples[k]) <=
                  1e-9 * std::max(1e-12, std::abs(big.samples[k])));
        }
    }
}

TEST_CASE("demultiplexing filters") {
    const double fs = 1e10;
    const circuit::FilterSpec lpf{circuit::FilterKind::lowpass, 60e3, 1, 1.0};
    const circuit::FilterSpec hpf{circuit::FilterKind::highpass, 100e3, 1, 2.5};

    SUBCASE("kind mismatch is a config error") {
        std::vector<double> v(64, 0.0);
        CHECK_THROWS_AS(circuit::demux(v, hpf, hpf, fs), ConfigError);
        CHECK_THROWS_AS(circuit::demux(v, lpf, lpf, fs), ConfigError);
    }
    SUBCASE("zero trace stays zero in both branches") {
        std::vector<double> v(256, 0.0);
        const auto out = circuit::demux(v, lpf, hpf, fs);
        for (double x : out.dc) CHECK(x == 0.0);
        for (double x : out.ac) CHECK(x == 0.0);
    }
    SUBCASE("10 kHz lands in the dc branch, attenuated in ac") {
        const auto lp = circuit::FilterChain::design(lpf, fs);
        const auto hp = circuit::FilterChain::design(hpf, fs);
        const double lp_db = 20.0 * std::log10(std::abs(lp.response(10e3, fs)));
        CHECK(lp_db > -0.2);
        for (int order : {1, 2, 3}) {
            circuit::FilterSpec spec = hpf;
            spec.order = order;
            spec.post_gain = 1.0;
            const auto chain = circuit::FilterChain::design(spec, fs);
            const double att_db = -20.0 * std::log10(std::abs(chain.response(10e3, fs)));
            CHECK(att_db >= 20.0 * order);  // one decade below cutoff
        }
    }
    SUBCASE("100 MHz passes the ac branch at post gain") {
        const auto hp = circuit::FilterChain::design(hpf, fs);
        const double gain_db = 20.0 * std::log10(std::abs(hp.response(100e6, fs)) / hpf.post_gain);
        CHECK(std::abs(gain_db) < 0.1);
        const auto lp = circuit::FilterChain::design(lpf, fs);
        CHECK(20.0 * std::log10(std::abs(lp.response(100e6, fs))) < -40.0);
    }
    SUBCASE("time-domain tone splits as the responses predict") {
        const double fs_lo = 1e7;
        const double f0 = 10e3;
        const std::size_t n = 20000;
        std::vector<double> v(n);
        for (std::size_t k = 0; k < n; ++k) {
            v[k] = std::sin(2.0 * constants::pi * f0 * double(k) / fs_lo);
        }
        const auto out = circuit::demux(v, lpf, hpf, fs_lo);
        double peak_dc = 0.0;
        for (std::size_t k = n / 2; k < n; ++k) peak_dc = std::max(peak_dc, std::abs(out.dc[k]));
        const double expected =
            std::abs(circuit::FilterChain::design(lpf, fs_lo).response(f0, fs_lo));
        CHECK(peak_dc == doctest::Approx(expected).epsilon(0.02));
    }
}
