#include "pscat/calib.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pscat/simplex.hpp"

namespace pscat::calib {

double shg_efficiency(double P_F_mw, const ShgModelParams& p) {
    if (P_F_mw < 0.0) throw std::invalid_argument("shg_efficiency: power must be >= 0");
    if (!(p.eta_inf > 0.0 && p.eta_inf <= 1.0 && p.g > 0.0))
        throw std::invalid_argument("shg_efficiency: parameters out of domain");
    const double t = std::tanh(p.g * std::sqrt(P_F_mw));
    return p.eta_inf * t * t;
}

std::pair<double, double> parametric_gain(double P_p_mw, const GainModelParams& p) {
    if (P_p_mw < 0.0) throw std::invalid_argument("parametric_gain: power must be >= 0");
    const double r = p.c * std::sqrt(P_p_mw);
    return {p.epsilon * std::exp(-2.0 * r) + (1.0 - p.epsilon),
            p.epsilon * std::exp(2.0 * r) + (1.0 - p.epsilon)};
}

std::pair<double, double> squeezing_variance(double P_p_mw, double c, double eta) {
    if (P_p_mw < 0.0) throw std::invalid_argument("squeezing_variance: power must be >= 0");
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("squeezing_variance: eta must lie in [0,1]");
    const double r = c * std::sqrt(P_p_mw);
    return {eta * std::exp(-2.0 * r) + (1.0 - eta), eta * std::exp(2.0 * r) + (1.0 - eta)};
}

double homodyne_efficiency(const EfficiencyBudget& b) {
    for (double e : {b.eta_op, b.eta_mm, b.eta_ph, b.eta_el})
        if (!(e >= 0.0 && e <= 1.0))
            throw std::invalid_argument("homodyne_efficiency: factors must lie in [0,1]");
    return b.eta_op * b.eta_mm * b.eta_mm * b.eta_ph * b.eta_el;
}

double electronic_noise_efficiency(double clearance_db) {
    if (clearance_db < 0.0)
        throw std::invalid_argument("electronic_noise_efficiency: clearance must be >= 0 dB");
    return 1.0 - std::pow(10.0, -clearance_db / 10.0);
}

double shot_noise_clearance(double n_lo_photons, const DetectorModel& d) {
    if (n_lo_photons < 0.0)
        throw std::invalid_argument("shot_noise_clearance: photon number must be >= 0");
    if (n_lo_photons == 0.0) throw NoSignal("shot_noise_clearance: no local oscillator photons");
    return 10.0 * std::log10(d.gain_mv2_per_1e6_photons * (n_lo_photons / 1e6) /
                             d.elec_noise_mv2);
}

// ---------------------------------------------------------------------------
// Curve fitting
// ---------------------------------------------------------------------------

namespace {

constexpr double kBig = 1e30;

double sum_squares(FitModel model, const std::vector<double>& p,
                   const std::vector<FitPoint>& pts) {
    double ssr = 0.0;
    switch (model) {
        case FitModel::Shg: {
            if (!(p[0] > 0.0 && p[0] <= 1.0 && p[1] > 0.0)) return kBig;
            for (const auto& q : pts) {
                const double d = shg_efficiency(q.x, {p[0], p[1]}) - q.y;
                ssr += d * d;
            }
            break;
        }
        case FitModel::Gain: {
            if (!(p[0] > 0.0 && p[1] >= 0.0 && p[1] <= 1.0)) return kBig;
            for (const auto& q : pts) {
                const auto [lo, hi] = parametric_gain(q.x, {p[0], p[1]});
                const double d1 = lo - q.y;
                const double d2 = hi - q.y2;
                ssr += d1 * d1 + d2 * d2;
            }
            break;
        }
        case FitModel::Squeezing: {
            if (!(p[0] > 0.0 && p[1] >= 0.0 && p[1] <= 1.0)) return kBig;
            for (const auto& q : pts) {
                const auto [lo, hi] = squeezing_variance(q.x, p[0], p[1]);
                const double d1 = lo - q.y;
                const double d2 = hi - q.y2;
                ssr += d1 * d1 + d2 * d2;
            }
            break;
        }
    }
    return std::isfinite(ssr) ? ssr : kBig;
}

std::vector<double> initial_guess(FitModel model, const std::vector<FitPoint>& pts) {
    double ymax = 0.0, xmax = 0.0, y2max = 1.0;
    for (const auto& q : pts) {
        if (q.x > xmax) {
            xmax = q.x;
            y2max = q.y2;
        }
        ymax = std::max(ymax, q.y);
    }
    switch (model) {
        case FitModel::Shg: {
            const double eta0 = std::clamp(ymax * 1.1, 0.05, 1.0);
            return {eta0, 0.5 / std::sqrt(std::max(xmax, 1e-6))};
        }
        case FitModel::Gain:
        case FitModel::Squeezing: {
            // Anti-squeezing branch at the largest power sets the scale of r.
            const double mix0 = 0.8;
            const double g = std::max((y2max - (1.0 - mix0)) / mix0, 1.2);
            const double r = 0.5 * std::log(g);
            return {r / std::sqrt(std::max(xmax, 1e-6)), mix0};
        }
    }
    return {0.5, 0.5};
}

}  // namespace

FitResult fit_curve(FitModel model, const std::vector<FitPoint>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_curve: need at least 3 points");
    const bool two_branch = model != FitModel::Shg;
    std::set<double> xs;
    for (const auto& q : points) {
        if (q.x < 0.0) throw std::invalid_argument("fit_curve: x must be >= 0");
        if (two_branch && !std::isfinite(q.y2))
            throw std::invalid_argument("fit_curve: two-branch model needs y2 on every point");
        xs.insert(q.x);
    }
    if (xs.size() < 2)
        throw FitDiverged("fit_curve: degenerate data (fewer distinct abscissae than parameters)");

    auto objective = [&](const std::vector<double>& p) { return sum_squares(model, p, points); };
    const std::vector<double> g0 = initial_guess(model, points);

    // Five deterministic starts around the data-driven guess.
    const double f1[] = {1.0, 0.5, 2.0, 1.0, 0.6};
    const double f2[] = {1.0, 1.0, 1.0, 0.5, 1.5};
    SimplexResult best{{}, kBig, false, 0};
    for (int s = 0; s < 5; ++s) {
        std::vector<double> start{g0[0] * f1[s], std::clamp(g0[1] * f2[s], 0.01, 1.0)};
        std::vector<double> scale{0.2 * std::abs(start[0]) + 1e-3, 0.1};
        SimplexResult res = nelder_mead(objective, start, scale);
        if (res.converged && res.value < best.value) best = res;
    }
    if (!best.converged || best.value >= kBig)
        throw FitDiverged("fit_curve: no simplex start converged");
    const int n_resid = static_cast<int>(points.size()) * (two_branch ? 2 : 1);
    return {best.x, std::sqrt(best.value / n_resid), static_cast<int>(points.size())};
}

}  // namespace pscat::calib
