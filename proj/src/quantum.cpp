#include "hdlab/quantum.hpp"

#include <cmath>

#include "hdlab/constants.hpp"
#include "hdlab/errors.hpp"

namespace hdlab::quantum {

double QuadratureState::min_variance() const { return std::pow(10.0, squeezing_db / 10.0); }

double QuadratureState::max_variance() const { return std::pow(10.0, antisqueezing_db / 10.0); }

void QuadratureState::validate() const {
    if (!std::isfinite(squeezing_db) || !std::isfinite(antisqueezing_db) ||
        !std::isfinite(squeezing_angle) || !std::isfinite(mean_q) || !std::isfinite(mean_p)) {
        throw DomainError("quadrature state has non-finite field");
    }
    const double vmin = min_variance();
    const double vmax = max_variance();
    if (!(vmin > 0.0) || !(vmax > 0.0)) {
        throw DomainError("quadrature variances must be positive");
    }
    // Heisenberg bound for the principal-axis variances, with float slack.
    if (vmin * vmax < 1.0 - 1e-12) {
        throw DomainError("variance product below the uncertainty bound");
    }
}

EfficiencyBudget EfficiencyBudget::make(double eta_mod, double eta_pd, double eta_elec) {
    for (double eta : {eta_mod, eta_pd, eta_elec}) {
        if (!(eta >= 0.0 && eta <= 1.0)) {
            throw DomainError("efficiency factor outside [0,1]");
        }
    }
    return {eta_mod, eta_pd, eta_elec, eta_mod * eta_pd * eta_pd * eta_elec};
}

void LocalOscillator::validate() const {
    if (!(amplitude >= 0.0)) throw DomainError("LO amplitude must be >= 0");
    if (mode_index < 0) throw DomainError("LO mode index must be >= 0");
}

double quadrature_variance(const QuadratureState& state, double theta) {
    const double c = std::cos(theta - state.squeezing_angle);
    const double s = std::sin(theta - state.squeezing_angle);
    return state.min_variance() * c * c + state.max_variance() * s * s;
}

double apply_loss(double variance, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("loss parameter eta outside [0,1]");
    if (!(variance > 0.0)) throw DomainError("variance must be positive");
    // Written so that apply_loss(1, eta) == 1 and the contraction toward the
    // vacuum is exact: apply_loss(V, eta) - 1 == eta * (V - 1) bit for bit.
    return 1.0 + eta * (variance - 1.0);
}

std::pair<double, double> homodyne_difference_moments(const LocalOscillator& lo,
                                                      const QuadratureState& state,
                                                      double eta) {
    lo.validate();
    state.validate();
    const double mean_q_theta =
        state.mean_q * std::cos(lo.phase) + state.mean_p * std::sin(lo.phase);
    const double mean = lo.amplitude * std::sqrt(eta) * mean_q_theta;
    const double variance =
        lo.amplitude * lo.amplitude * apply_loss(quadrature_variance(state, lo.phase), eta);
    return {mean, variance};
}

double pd_quantum_efficiency(double responsivity_a_per_w, double wavelength_m) {
    if (!(responsivity_a_per_w > 0.0)) throw DomainError("responsivity must be positive");
    if (!(wavelength_m > 0.0)) throw DomainError("wavelength must be positive");
    const double eta = responsivity_a_per_w * constants::planck * constants::light_speed /
                       (wavelength_m * constants::elementary_charge);
    if (eta > 1.0) {
        throw DomainError("responsivity implies quantum efficiency > 1; datasheet inconsistent");
    }
    return eta;
}

double electronic_efficiency_from_snc(double snc_db) {
    if (!(snc_db >= 0.0)) throw DomainError("shot-noise clearance must be >= 0 dB");
    return 1.0 - std::pow(10.0, -snc_db / 10.0);
}

double snc_from_electronic_efficiency(double eta_elec) {
    if (!(eta_elec >= 0.0 && eta_elec < 1.0)) {
        throw DomainError("electronic efficiency must be in [0,1)");
    }
    return -10.0 * std::log10(1.0 - eta_elec);
}

double total_efficiency(const EfficiencyBudget& budget) {
    for (double eta : {budget.eta_mod, budget.eta_pd, budget.eta_elec}) {
        if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("efficiency factor outside [0,1]");
    }
    return budget.eta_mod * budget.eta_pd * budget.eta_pd * budget.eta_elec;
}

}  // namespace hdlab::quantum
