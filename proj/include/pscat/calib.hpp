#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "pscat/errors.hpp"

namespace pscat::calib {

// Parametric gain model: r = c sqrt(P_p), mixed with vacuum by the spatial
// overlap epsilon of seed and pump.
struct GainModelParams {
    double c;        // mW^{-1/2}
    double epsilon;  // in [0,1]
};

// Second-harmonic conversion efficiency: eta_inf tanh^2(g sqrt(P_F)).
struct ShgModelParams {
    double eta_inf;
    double g;  // mW^{-1/2}
};

// Pulsed homodyne detector noise model.
struct DetectorModel {
    double gain_mv2_per_1e6_photons;
    double elec_noise_mv2;
};

// Factors of the homodyne detection efficiency budget.
struct EfficiencyBudget {
    double eta_op;  // optical propagation
    double eta_mm;  // mode matching (enters squared)
    double eta_ph;  // photodiode quantum efficiency
    double eta_el;  // electronic-noise equivalent efficiency
};

double shg_efficiency(double P_F_mw, const ShgModelParams& p);

// (g_min, g_max) = (eps e^{-2r} + 1-eps, eps e^{+2r} + 1-eps), r = c sqrt(P_p).
std::pair<double, double> parametric_gain(double P_p_mw, const GainModelParams& p);

// Shot-noise normalized (V_min, V_max) = (eta e^{-2r} + 1-eta, eta e^{+2r} + 1-eta).
std::pair<double, double> squeezing_variance(double P_p_mw, double c, double eta);

// eta_op * eta_mm^2 * eta_ph * eta_el.
double homodyne_efficiency(const EfficiencyBudget& b);

// 1 - 10^{-clearance/10}.
double electronic_noise_efficiency(double clearance_db);

// 10 log10(gain * n/1e6 / elec_noise); throws NoSignal at n = 0.
double shot_noise_clearance(double n_lo_photons, const DetectorModel& d);

enum class FitModel { Shg, Gain, Squeezing };

// One measurement: x = power; y = efficiency (Shg) or the lower branch
// (Gain/Squeezing); y2 = upper branch for the two-branch models.
struct FitPoint {
    double x;
    double y;
    double y2 = std::numeric_limits<double>::quiet_NaN();
};

struct FitResult {
    std::vector<double> params;  // (eta_inf, g) | (c, epsilon) | (c, eta)
    double residual_rms;
    int n_points;
};

// Least-squares fit by multi-start Nelder-Mead. Two-branch models weight both
// branches equally. Throws FitDiverged when no start converges or the data
// are degenerate (fewer distinct abscissae than parameters).
FitResult fit_curve(FitModel model, const std::vector<FitPoint>& points);

}  // namespace pscat::calib
