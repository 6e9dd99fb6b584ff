#include "pscat/gauss.hpp"

#include <cmath>
#include <numbers>

#include "pscat/catanalysis.hpp"

namespace pscat::gauss {

namespace {

constexpr double kPi = std::numbers::pi;

double gaussian2(const Eigen::Vector2d& x, const Eigen::Vector2d& mean,
                 const Eigen::Matrix2d& cov) {
    const double det = cov.determinant();
    const Eigen::Vector2d d = x - mean;
    const double q = d.dot(cov.inverse() * d);
    return std::exp(-0.5 * q) / (2.0 * kPi * std::sqrt(det));
}

void validate_component(const GaussianComponent& c) {
    if (std::abs(c.cov(0, 1) - c.cov(1, 0)) > 1e-12)
        throw std::invalid_argument("GaussianComponent: covariance not symmetric");
    if (!(c.cov.trace() > 0.0 && c.cov.determinant() > 0.0))
        throw std::invalid_argument("GaussianComponent: covariance not positive definite");
}

}  // namespace

GaussianMixtureWigner::GaussianMixtureWigner(std::vector<GaussianComponent> components)
    : comps_(std::move(components)) {
    if (comps_.empty()) throw std::invalid_argument("GaussianMixtureWigner: no components");
    double w = 0.0;
    for (const auto& c : comps_) {
        validate_component(c);
        w += c.weight;
    }
    if (std::abs(w - 1.0) > 1e-9)
        throw std::invalid_argument("GaussianMixtureWigner: weights sum to " + std::to_string(w));
}

double GaussianMixtureWigner::value(double x, double p) const {
    const Eigen::Vector2d X(x, p);
    double v = 0.0;
    for (const auto& c : comps_) v += c.weight * gaussian2(X, c.mean, c.cov);
    return v;
}

double GaussianMixtureWigner::weight_sum() const {
    double w = 0.0;
    for (const auto& c : comps_) w += c.weight;
    return w;
}

Eigen::Vector2d GaussianMixtureWigner::mean() const {
    Eigen::Vector2d m = Eigen::Vector2d::Zero();
    for (const auto& c : comps_) m += c.weight * c.mean;
    return m;
}

Eigen::Matrix2d GaussianMixtureWigner::covariance() const {
    const Eigen::Vector2d mu = mean();
    Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
    for (const auto& c : comps_)
        s += c.weight * (c.cov + c.mean * c.mean.transpose());
    return s - mu * mu.transpose();
}

GaussianMixtureWigner squeezed_wigner(double V_x, double V_p) {
    if (!(V_x > 0.0 && V_p > 0.0))
        throw std::invalid_argument("squeezed_wigner: variances must be positive");
    if (V_x * V_p < 1.0 - 1e-9)
        throw UncertaintyViolation("squeezed_wigner: V_x*V_p = " + std::to_string(V_x * V_p) +
                                   " < 1");
    GaussianComponent c{1.0, Eigen::Vector2d::Zero(),
                        Eigen::Vector2d(0.5 * V_x, 0.5 * V_p).asDiagonal()};
    return GaussianMixtureWigner({c});
}

SubtractResult subtract_click(const GaussianMixtureWigner& w_in, double R) {
    if (!(R > 0.0 && R < 1.0)) throw std::invalid_argument("subtract_click: R must be in (0,1)");
    const double T = 1.0 - R;
    const Eigen::Matrix2d vac = 0.5 * Eigen::Matrix2d::Identity();

    std::vector<GaussianComponent> out;
    out.reserve(2 * w_in.size());
    double p_click = 0.0;
    for (const auto& c : w_in.components()) {
        // Two-mode Gaussian after the beamsplitter, blocks of the covariance:
        //   A = T S + R/2 I,  B = R S + T/2 I,  C = sqrt(TR) (I/2 - S)
        const Eigen::Matrix2d A = T * c.cov + R * vac;
        const Eigen::Matrix2d B = R * c.cov + T * vac;
        const Eigen::Matrix2d C = std::sqrt(T * R) * (vac - c.cov);
        const Eigen::Vector2d m1 = std::sqrt(T) * c.mean;
        const Eigen::Vector2d m2 = -std::sqrt(R) * c.mean;

        // Identity part of the POVM: marginal over the tap mode.
        out.push_back({c.weight, m1, A});

        // -2 * <vacuum projector>: Gaussian evidence integral against the tap.
        const Eigen::Matrix2d BI = B + vac;
        const Eigen::Matrix2d BIinv = BI.inverse();
        const double z = std::exp(-0.5 * m2.dot(BIinv * m2)) /
                         (2.0 * kPi * std::sqrt(BI.determinant()));
        const Eigen::Vector2d mt = m1 - C * BIinv * m2;
        const Eigen::Matrix2d St = A - C * BIinv * C.transpose();
        out.push_back({-2.0 * kPi * z * c.weight, mt, St});

        p_click += c.weight * (1.0 - 2.0 * kPi * z);
    }
    if (p_click < 1e-12)
        throw HeraldImpossible("subtract_click: click probability below 1e-12");
    for (auto& c : out) c.weight /= p_click;
    return {GaussianMixtureWigner(std::move(out)), p_click};
}

GaussianMixtureWigner mix_modal_purity(const GaussianMixtureWigner& w_out,
                                       const GaussianMixtureWigner& w_false, double xi) {
    if (!(xi >= 0.0 && xi <= 1.0))
        throw std::invalid_argument("mix_modal_purity: xi must lie in [0,1]");
    if (xi == 1.0) return w_out;
    if (xi == 0.0) return w_false;
    std::vector<GaussianComponent> comps;
    comps.reserve(w_out.size() + w_false.size());
    for (auto c : w_out.components()) {
        c.weight *= xi;
        comps.push_back(c);
    }
    for (auto c : w_false.components()) {
        c.weight *= 1.0 - xi;
        comps.push_back(c);
    }
    return GaussianMixtureWigner(std::move(comps));
}

GaussianMixtureWigner apply_gaussian_loss(const GaussianMixtureWigner& w, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("apply_gaussian_loss: eta must lie in [0,1]");
    const Eigen::Matrix2d vac = 0.5 * Eigen::Matrix2d::Identity();
    std::vector<GaussianComponent> comps = w.components();
    for (auto& c : comps) {
        c.mean *= std::sqrt(eta);
        c.cov = eta * c.cov + (1.0 - eta) * vac;
    }
    return GaussianMixtureWigner(std::move(comps));
}

fock::DensityMatrix mixture_to_fock(const GaussianMixtureWigner& w, int n_max,
                                    const FockGrid& grid) {
    const int npts = static_cast<int>(std::round(2.0 * grid.extent / grid.step)) + 1;
    const double h = 2.0 * grid.extent / (npts - 1);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n_max + 1, n_max + 1);
    const double cell = 2.0 * kPi * h * h;
    double grid_mass = 0.0;
    for (int i = 0; i < npts; ++i) {
        const double x = -grid.extent + i * h;
        for (int j = 0; j < npts; ++j) {
            const double p = -grid.extent + j * h;
            const double wv = w.value(x, p);
            if (std::abs(wv) < 1e-14) continue;
            grid_mass += wv * h * h;
            rho += (cell * wv) * fock::wigner_kernel(n_max, x, p);
        }
    }
    // The grid sum of W itself measures quadrature quality; the recovered
    // trace may additionally fall short by the (legitimate) mass above n_max,
    // which is renormalized away as a projection.
    if (std::abs(grid_mass - w.weight_sum()) > 1e-5)
        throw QuadratureFailure("mixture_to_fock: quadrature mass drifted to " +
                                std::to_string(grid_mass));
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > 1e-2)
        throw QuadratureFailure("mixture_to_fock: trace " + std::to_string(tr) +
                                " is too far from one (truncation too aggressive)");
    rho /= tr;
    rho = 0.5 * (rho + rho.adjoint().eval());
    return fock::DensityMatrix(std::move(rho), 1e-6);
}

std::pair<GaussianMixtureWigner, GaussianMixtureWigner> predict_mixtures(
    double P_p_mw, const PredictConfig& cfg, double* success_prob) {
    if (!(P_p_mw >= 0.0)) throw std::invalid_argument("predict_state: pump power must be >= 0");
    const double r = cfg.gain_c * std::sqrt(P_p_mw);
    const double eta_in =
        cfg.view == CorrectionView::FullyCorrected ? 1.0 : cfg.input_efficiency();

    GaussianMixtureWigner input = squeezed_wigner(std::exp(-2.0 * r), std::exp(2.0 * r));
    input = apply_gaussian_loss(input, eta_in);

    auto [heralded, p_click] = subtract_click(input, cfg.tap_R);
    if (success_prob) *success_prob = p_click;

    // The false-trigger mode is the squeezed beam itself, transmitted through
    // the same tap.
    GaussianMixtureWigner false_mode = apply_gaussian_loss(input, 1.0 - cfg.tap_R);

    if (cfg.view == CorrectionView::AsMeasured) {
        heralded = apply_gaussian_loss(heralded, cfg.eta_hd);
        false_mode = apply_gaussian_loss(false_mode, cfg.eta_hd);
    }
    return {std::move(heralded), std::move(false_mode)};
}

PredictionRecord predict_state(double P_p_mw, const PredictConfig& cfg, int n_max) {
    double p_click = 0.0;
    auto [heralded, false_mode] = predict_mixtures(P_p_mw, cfg, &p_click);
    const GaussianMixtureWigner mixed = mix_modal_purity(heralded, false_mode, cfg.xi);
    // Enlarge the working space until the squeezed input fits below the
    // truncation gate; the record carries only scalars, so this is free.
    const double r = cfg.gain_c * std::sqrt(P_p_mw);
    const int n_work = std::max(n_max, fock::squeezed_vacuum_levels(r));
    const fock::DensityMatrix rho = mixture_to_fock(mixed, n_work);
    const auto best = cat::cat_fidelity_max(rho);
    return {P_p_mw, best.fidelity, best.alpha, cat::wigner_origin(rho), p_click, cfg.xi};
}

}  // namespace pscat::gauss
