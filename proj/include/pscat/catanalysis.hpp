#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pscat/fock.hpp"
#include "pscat/gauss.hpp"

namespace pscat::cat {

struct CatFit {
    double fidelity;
    double alpha;
    bool at_boundary;  // optimum pinned to an end of the search interval
};

// Best overlap with an ideal odd cat, maximized over the amplitude alpha in
// [alpha_lo, alpha_hi] (0.01-step scan + golden-section refinement) and over
// the two axis orientations: |alpha> - |-alpha> along x and its 90-degree
// rotation. Subtracting a photon from an x-squeezed state produces the
// p-oriented cat, so orientation must be part of the maximization.
CatFit cat_fidelity_max(const fock::DensityMatrix& rho, double alpha_lo = 0.1,
                        double alpha_hi = 3.0);

// W(0,0) by the parity sum (1/pi) sum_n (-1)^n rho_nn.
double wigner_origin(const fock::DensityMatrix& rho);

// Fidelity between the ideally subtracted squeezed state (tap reflectivity
// -> 0) and the odd cat, on a grid of squeezing depths (dB below vacuum) x
// amplitudes. Rows follow alphas, columns follow squeezing_db. States are
// built in a Fock space of at least n_max levels, enlarged when the
// squeezing demands it.
Eigen::MatrixXd fidelity_surface(const std::vector<double>& squeezing_db,
                                 const std::vector<double>& alphas, int n_max = 20,
                                 double tap_R = 1e-4);

struct AnalysisReport {
    double P_p = 0.0;
    double F_odd;
    double alpha_opt;
    bool alpha_at_boundary = false;
    double w00;
    std::optional<double> xi_fit;
    Eigen::VectorXd photon_dist;
    std::string source;  // predicted | reconstructed | reconstructed_loss_corrected
};

AnalysisReport analyze(const fock::DensityMatrix& rho, const std::string& source,
                       double P_p = 0.0);

struct XiFitConfig {
    gauss::PredictConfig model;
    double P_p_mw;
    int n_max = 20;
    // Mismatch weights: one tolerance unit per observable.
    double tol_fidelity = 0.03;
    double tol_w00 = 0.02;
    // NoFit when the best joint mismatch exceeds this many squared units.
    double reject_above = 50.0;
};

// Modal purity that best explains a measured (F_odd, W(0,0)) pair under the
// prediction model: golden-section search of the weighted squared mismatch
// over xi in [0,1]. Throws NoFit when the model cannot approach the
// measurement anywhere in the interval.
double fit_xi(double measured_F_odd, double measured_w00, const XiFitConfig& cfg);

}  // namespace pscat::cat
