#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pscat/acquisim.hpp"
#include "pscat/errors.hpp"
#include "pscat/fock.hpp"

namespace pscat::tomo {

struct PhaseBin {
    int bin_index;
    double theta;     // estimated phase in [0, pi/2]
    double variance;  // bin variance, shot-noise units
    bool clamped;     // variance fell outside [v_min, v_max]
};

struct PhaseAssignment {
    std::vector<PhaseBin> bins;
    int bin_size;
    double v_min;
    double v_max;
};

// Phase estimation from binned variances via
// V_i = V_min cos^2(theta_i) + V_max sin^2(theta_i), folded to [0, pi/2].
// Samples are grouped by segment index (segment / bin_size). When v_min or
// v_max is NaN it is taken from the 2nd / 98th percentile of the bin
// variances. Throws PhaseUnresolvable when v_max - v_min < 0.05 v_min.
PhaseAssignment estimate_phases(const acq::QuadratureDataset& ds,
                                double v_min = std::numeric_limits<double>::quiet_NaN(),
                                double v_max = std::numeric_limits<double>::quiet_NaN(),
                                int bin_size = 100);

// Assignment that folds the true scan phases instead of estimating them from
// variances; for simulation studies and phase-insensitive states.
PhaseAssignment assignment_from_scan(const acq::QuadratureDataset& ds, int bin_size = 100);

// Measurement operators for phase-binned, x-binned homodyne data. One real
// kernel per x bin (shared by all phases; phases enter as a diagonal phase
// conjugation), including two tail bins so each phase resolves the identity.
// For eta < 1 the adjoint Bernoulli map turns the projectors into
// loss-corrected elements.
class PovmSet {
  public:
    int n_phases() const { return static_cast<int>(thetas_.size()); }
    int n_xbins() const { return static_cast<int>(kernels_.size()); }
    double eta_correction() const { return eta_; }
    int n_max() const { return static_cast<int>(kernels_.front().rows()) - 1; }
    double theta(int i) const { return thetas_[i]; }
    const Eigen::MatrixXd& kernel(int xbin) const { return kernels_[xbin]; }

    // Bin index for a quadrature value in Wigner units (tails included).
    int bin_of(double x_wigner) const;

    // Full complex element for (phase bin, x bin).
    Eigen::MatrixXcd element(int phase_idx, int xbin_idx) const;

    // sum_j element(i, j); equals the identity up to quadrature error.
    Eigen::MatrixXcd completeness(int phase_idx) const;

    friend PovmSet build_povm(const PhaseAssignment&, const Eigen::VectorXd&, int, double);

  private:
    std::vector<double> thetas_;
    std::vector<Eigen::MatrixXd> kernels_;  // [left tail, interior bins..., right tail]
    Eigen::VectorXd edges_;
    double eta_ = 1.0;
};

// 100 uniform bins over [-6, 6] (Wigner units).
Eigen::VectorXd default_x_edges(int n_bins = 100, double extent = 6.0);

// Edges must increase strictly and cover at least [-6, 6]. eta = 1 gives bare
// projectors; eta in [0.5, 1) applies the adjoint loss map;
// eta < 0.5 throws IllConditionedCorrection.
PovmSet build_povm(const PhaseAssignment& assignment, const Eigen::VectorXd& x_edges, int n_max,
                   double eta = 1.0);

struct MleOptions {
    double rel_ll_change = 1e-9;
    int max_iter = 2000;
};

struct ReconstructionResult {
    fock::DensityMatrix rho;
    std::vector<double> log_likelihood_trace;  // one value per iteration
    int iterations;
    bool converged;
    double eta_correction;
};

// Iterative maximum-likelihood reconstruction: rho <- N[R rho R] with
// R = sum_j (f_j / tr[rho Pi_j]) Pi_j, started from the maximally mixed
// state. The log-likelihood is kept nondecreasing (a damped step is taken on
// the rare non-increasing iteration). Throws EmptyData on an empty dataset;
// returns converged = false when the iteration cap is reached.
ReconstructionResult mle_reconstruct(const acq::QuadratureDataset& ds,
                                     const PhaseAssignment& assignment, const PovmSet& povm,
                                     const MleOptions& options = {});

}  // namespace pscat::tomo
