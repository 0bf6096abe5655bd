#pragma once

#include <utility>

namespace hdlab::quantum {

// Gaussian state of one spectral mode, second moments in shot-noise units
// (vacuum variance = 1). Negative squeezing_db means below shot noise.
struct QuadratureState {
    double squeezing_db = 0.0;
    double antisqueezing_db = 0.0;
    double squeezing_angle = 0.0;  // phase of minimum variance, radians
    double mean_q = 0.0;
    double mean_p = 0.0;

    double min_variance() const;  // 10^(squeezing_db/10)
    double max_variance() const;

    // Throws DomainError unless both variances are positive and
    // min_variance * max_variance >= 1 - 1e-12.
    void validate() const;

    static QuadratureState vacuum() { return {}; }
};

struct EfficiencyBudget {
    double eta_mod = 1.0;
    double eta_pd = 1.0;
    double eta_elec = 1.0;
    double eta_total = 1.0;  // eta_mod * eta_pd^2 * eta_elec

    static EfficiencyBudget make(double eta_mod, double eta_pd, double eta_elec);
};

struct LocalOscillator {
    double amplitude = 0.0;   // sqrt(mean photon number per pulse)
    double phase = 0.0;       // radians
    double wavelength = 0.0;  // meters
    int mode_index = 0;

    void validate() const;
};

// V(theta) = Vmin cos^2(theta - angle) + Vmax sin^2(theta - angle)
double quadrature_variance(const QuadratureState& state, double theta);

// Beam-splitter admixture of vacuum: eta*V + (1 - eta).
double apply_loss(double variance, double eta);

// Mean and variance of the subtracted photocurrent in photon-number units:
// mean = sqrt(eta) * |a_lo| * <q_theta>, variance = |a_lo|^2 * apply_loss(V(theta), eta).
std::pair<double, double> homodyne_difference_moments(const LocalOscillator& lo,
                                                      const QuadratureState& state,
                                                      double eta);

// Photon-to-electron conversion efficiency from responsivity: S * h c / (lambda e).
double pd_quantum_efficiency(double responsivity_a_per_w, double wavelength_m);

// eta_elec = 1 - 10^(-snc_db/10)
double electronic_efficiency_from_snc(double snc_db);
double snc_from_electronic_efficiency(double eta_elec);

double total_efficiency(const EfficiencyBudget& budget);

}  // namespace hdlab::quantum
