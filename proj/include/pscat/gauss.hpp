#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pscat/errors.hpp"
#include "pscat/fock.hpp"

namespace pscat::gauss {

// One term of a signed Gaussian mixture in the (x,p) plane, Wigner units
// (vacuum covariance I/2). Weights may be negative; a normalized state has
// weights summing to 1.
struct GaussianComponent {
    double weight;
    Eigen::Vector2d mean;
    Eigen::Matrix2d cov;
};

// Signed mixture of 2-D Gaussians representing a Wigner function in closed
// form. Construction checks that each covariance is symmetric (1e-12) and
// positive definite, and that the weights sum to 1 within 1e-9.
class GaussianMixtureWigner {
  public:
    explicit GaussianMixtureWigner(std::vector<GaussianComponent> components);

    const std::vector<GaussianComponent>& components() const { return comps_; }
    std::size_t size() const { return comps_.size(); }

    double value(double x, double p) const;
    double weight_sum() const;

    // First and second moments of the signed mixture.
    Eigen::Vector2d mean() const;
    Eigen::Matrix2d covariance() const;

  private:
    std::vector<GaussianComponent> comps_;
};

// Single-Gaussian squeezed (or thermal-squeezed) state from shot-noise
// normalized variances: mean 0, covariance diag(V_x/2, V_p/2). Throws
// UncertaintyViolation if V_x * V_p < 1 - 1e-9.
GaussianMixtureWigner squeezed_wigner(double V_x, double V_p);

struct SubtractResult {
    GaussianMixtureWigner state;
    double success_probability;
};

// Photon subtraction in the Gaussian picture: beamsplitter of reflectivity R
// against vacuum, tap mode integrated against the click POVM
// W_Lambda = 1/(2pi) - exp(-x^2-p^2)/pi, output renormalized by the click
// probability. Every integral is closed-form; each input component yields two
// output components.
SubtractResult subtract_click(const GaussianMixtureWigner& w_in, double R);

// Herald/false-mode mixture: xi * w_out + (1 - xi) * w_false.
GaussianMixtureWigner mix_modal_purity(const GaussianMixtureWigner& w_out,
                                       const GaussianMixtureWigner& w_false, double xi);

// Loss channel at the Wigner level: mean -> sqrt(eta) mean,
// cov -> eta cov + (1-eta)/2 I, weights unchanged.
GaussianMixtureWigner apply_gaussian_loss(const GaussianMixtureWigner& w, double eta);

struct FockGrid {
    double extent = 8.5;  // integration box [-extent, extent]^2
    double step = 0.05;
};

// Fock-basis density matrix of the mixture:
// rho_mn = 2pi ∫ W(X) K_mn(X) dX with K the displaced-parity kernel.
// Throws QuadratureFailure if the recovered trace drifts from 1 by more
// than 1e-5. The result is validated with PSD tolerance 1e-6.
fock::DensityMatrix mixture_to_fock(const GaussianMixtureWigner& w, int n_max,
                                    const FockGrid& grid = {});

// Which detection losses remain in the reported state.
enum class CorrectionView {
    AsMeasured,     // includes the homodyne chain (eta_hd)
    LossCorrected,  // homodyne chain removed
    FullyCorrected  // homodyne chain and residual input loss removed
};

struct PredictConfig {
    double gain_c = 0.28;    // r = gain_c * sqrt(P_p[mW])
    double tap_R = 0.077;    // subtraction tap reflectivity
    double eta_hd = 0.77;    // homodyne chain efficiency
    double eta_bs = 0.92;    // tap transmission efficiency (approx. 1 - tap_R)
    double eta_total = 0.62; // end-to-end efficiency seen by the squeezing fit
    double xi = 1.0;         // modal purity of the herald
    CorrectionView view = CorrectionView::AsMeasured;

    // Residual efficiency of the input squeezed state not explained by the
    // tap and the homodyne chain; folded into the state before subtraction.
    double input_efficiency() const { return eta_total / (eta_hd * eta_bs); }
};

struct PredictionRecord {
    double P_p;
    double F_odd;
    double alpha;
    double w00;
    double success_prob;
    double xi;
};

// Full prediction pipeline for one pump power: squeezed input (with residual
// impurity), tap-and-click subtraction, modal-purity mixing, detection loss
// per the chosen view, then cat fidelity / optimal amplitude / W(0,0).
PredictionRecord predict_state(double P_p_mw, const PredictConfig& cfg, int n_max = 20);

// The pre-detection mixture pair used by predict_state: the heralded state
// and the false-trigger (plain squeezed) state, both in the chosen view.
// Exposed so that Ξ scans can reuse the expensive pieces.
std::pair<GaussianMixtureWigner, GaussianMixtureWigner> predict_mixtures(
    double P_p_mw, const PredictConfig& cfg, double* success_prob = nullptr);

}  // namespace pscat::gauss
