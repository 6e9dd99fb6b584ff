#include "pscat/catanalysis.hpp"

#include <cmath>
#include <numbers>

namespace pscat::cat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGolden = 0.6180339887498949;

// Odd cat aligned with x, or rotated onto p. Sized so that the truncation
// tail stays below the construction gate.
fock::PureState make_cat(double alpha, int n_min, bool along_p) {
    const int n = std::max(n_min, fock::odd_cat_levels(alpha));
    fock::PureState c = fock::odd_cat(alpha, n);
    return along_p ? fock::rotated(c, 0.5 * kPi) : c;
}

double oriented_cat_fidelity(const fock::DensityMatrix& rho, double alpha) {
    const double fx = fock::fidelity(rho, make_cat(alpha, rho.n_max(), false));
    const double fp = fock::fidelity(rho, make_cat(alpha, rho.n_max(), true));
    return std::max(fx, fp);
}

}  // namespace

CatFit cat_fidelity_max(const fock::DensityMatrix& rho, double alpha_lo, double alpha_hi) {
    if (!(alpha_lo > 0.0 && alpha_hi > alpha_lo))
        throw std::invalid_argument("cat_fidelity_max: bad alpha range");
    const double step = 0.01;
    double best_f = -1.0, best_a = alpha_lo;
    for (double a = alpha_lo; a <= alpha_hi + 0.5 * step; a += step) {
        const double aa = std::min(a, alpha_hi);
        const double f = oriented_cat_fidelity(rho, aa);
        if (f > best_f) {
            best_f = f;
            best_a = aa;
        }
    }
    // Golden-section refinement inside the bracketing grid cells.
    double lo = std::max(alpha_lo, best_a - step);
    double hi = std::min(alpha_hi, best_a + step);
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = oriented_cat_fidelity(rho, x1);
    double f2 = oriented_cat_fidelity(rho, x2);
    for (int it = 0; it < 60 && hi - lo > 1e-6; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = oriented_cat_fidelity(rho, x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = oriented_cat_fidelity(rho, x1);
        }
    }
    if (f1 > best_f) {
        best_f = f1;
        best_a = x1;
    }
    if (f2 > best_f) {
        best_f = f2;
        best_a = x2;
    }
    const bool boundary = best_a <= alpha_lo + 1.5 * step || best_a >= alpha_hi - 1.5 * step;
    return {best_f, best_a, boundary};
}

double wigner_origin(const fock::DensityMatrix& rho) {
    double s = 0.0;
    for (int n = 0; n <= rho.n_max(); ++n)
        s += (n % 2 ? -1.0 : 1.0) * rho(n, n).real();
    return s / kPi;
}

Eigen::MatrixXd fidelity_surface(const std::vector<double>& squeezing_db,
                                 const std::vector<double>& alphas, int n_max, double tap_R) {
    if (squeezing_db.empty() || alphas.empty())
        throw std::invalid_argument("fidelity_surface: empty grid");
    Eigen::MatrixXd f(alphas.size(), squeezing_db.size());
    for (std::size_t j = 0; j < squeezing_db.size(); ++j) {
        const double r = squeezing_db[j] * std::numbers::ln10 / 20.0;
        const int n = std::max(n_max, fock::squeezed_vacuum_levels(r));
        const auto subtracted = fock::herald_subtract(fock::squeezed_vacuum(r, n), tap_R);
        for (std::size_t i = 0; i < alphas.size(); ++i)
            f(i, j) = oriented_cat_fidelity(subtracted.state, alphas[i]);
    }
    return f;
}

AnalysisReport analyze(const fock::DensityMatrix& rho, const std::string& source, double P_p) {
    const CatFit fit = cat_fidelity_max(rho);
    AnalysisReport rep;
    rep.P_p = P_p;
    rep.F_odd = fit.fidelity;
    rep.alpha_opt = fit.alpha;
    rep.alpha_at_boundary = fit.at_boundary;
    rep.w00 = wigner_origin(rho);
    rep.photon_dist = fock::photon_distribution(rho);
    rep.source = source;
    return rep;
}

double fit_xi(double measured_F_odd, double measured_w00, const XiFitConfig& cfg) {
    // The mixture is linear in xi, so the two Fock states are computed once
    // and recombined per evaluation.
    auto [heralded, false_mode] = gauss::predict_mixtures(cfg.P_p_mw, cfg.model);
    const int n_work = std::max(
        cfg.n_max, fock::squeezed_vacuum_levels(cfg.model.gain_c * std::sqrt(cfg.P_p_mw)));
    const Eigen::MatrixXcd rho_h = gauss::mixture_to_fock(heralded, n_work).elements();
    const Eigen::MatrixXcd rho_f = gauss::mixture_to_fock(false_mode, n_work).elements();

    auto mismatch = [&](double xi) {
        fock::DensityMatrix rho(xi * rho_h + (1.0 - xi) * rho_f, 1e-6);
        const CatFit fit = cat_fidelity_max(rho);
        const double df = (fit.fidelity - measured_F_odd) / cfg.tol_fidelity;
        const double dw = (wigner_origin(rho) - measured_w00) / cfg.tol_w00;
        return df * df + dw * dw;
    };

    double lo = 0.0, hi = 1.0;
    const double j_lo = mismatch(lo);
    const double j_hi = mismatch(hi);
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double j1 = mismatch(x1);
    double j2 = mismatch(x2);
    while (hi - lo > 1e-4) {
        if (j1 > j2) {
            lo = x1;
            x1 = x2;
            j1 = j2;
            x2 = lo + kGolden * (hi - lo);
            j2 = mismatch(x2);
        } else {
            hi = x2;
            x2 = x1;
            j2 = j1;
            x1 = hi - kGolden * (hi - lo);
            j1 = mismatch(x1);
        }
    }
    double best_xi = 0.5 * (lo + hi);
    double best_j = mismatch(best_xi);
    if (j_lo < best_j) {
        best_j = j_lo;
        best_xi = 0.0;
    }
    if (j_hi < best_j) {
        best_j = j_hi;
        best_xi = 1.0;
    }
    if (best_j > cfg.reject_above)
        throw NoFit("fit_xi: best mismatch " + std::to_string(best_j) +
                    " exceeds rejection threshold");
    return best_xi;
}

}  // namespace pscat::cat
