#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "pscat/errors.hpp"

namespace pscat::fock {

using Cplx = std::complex<double>;

// Quadrature convention used throughout: the vacuum Wigner function is
// exp(-x^2-p^2)/pi, so the vacuum quadrature variance is 1/2 and the
// rotated quadrature is x_theta = x cos(theta) + p sin(theta).
// Shot-noise-normalized variances (vacuum = 1) are twice these.
inline constexpr double kVacuumVariance = 0.5;

inline constexpr double kDefaultMaxTail = 1e-6;

// Pure state in a photon-number basis truncated at n_max.
class PureState {
  public:
    // Normalizes the supplied amplitudes; throws std::invalid_argument on a
    // null vector.
    explicit PureState(Eigen::VectorXcd coeffs);

    int n_max() const { return static_cast<int>(coeffs_.size()) - 1; }
    const Eigen::VectorXcd& coeffs() const { return coeffs_; }
    Cplx coeff(int n) const { return coeffs_(n); }
    double population(int n) const { return std::norm(coeffs_(n)); }

    // Projection onto levels 0..new_n_max followed by renormalization.
    PureState truncated(int new_n_max) const;
    // Zero-extension to a larger space.
    PureState padded(int new_n_max) const;

  private:
    Eigen::VectorXcd coeffs_;
};

// Density operator in the truncated photon-number basis. Construction
// validates Hermiticity (1e-9), unit trace (1e-9) and positivity
// (min eigenvalue >= -psd_tol), then symmetrizes and renormalizes exactly.
class DensityMatrix {
  public:
    explicit DensityMatrix(Eigen::MatrixXcd elements, double psd_tol = 1e-8);

    static DensityMatrix from_pure(const PureState& psi);

    int n_max() const { return static_cast<int>(m_.rows()) - 1; }
    int dim() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXcd& elements() const { return m_; }
    Cplx operator()(int m, int n) const { return m_(m, n); }

    DensityMatrix padded(int new_n_max) const;
    // Projection onto levels 0..new_n_max, trace renormalized.
    DensityMatrix truncated(int new_n_max) const;

  private:
    struct unchecked_t {};
    DensityMatrix(Eigen::MatrixXcd elements, unchecked_t) : m_(std::move(elements)) {}

    Eigen::MatrixXcd m_;
};

// ---------------------------------------------------------------------------
// State factories
// ---------------------------------------------------------------------------

// Squeezed vacuum S(r)|0>, squeezed along x (theta = 0):
// c_{2k} = (-tanh r)^k sqrt((2k)!) / (2^k k! sqrt(cosh r)), c_0 > 0.
// Throws TruncationError if the analytic tail mass above n_max is >= max_tail.
PureState squeezed_vacuum(double r, int n_max, double max_tail = kDefaultMaxTail);

// Odd coherent-state superposition |alpha> - |-alpha| (alpha > 0, real),
// normalized; only odd photon numbers are populated.
PureState odd_cat(double alpha, int n_max, double max_tail = kDefaultMaxTail);

// Smallest n_max at which the analytic tail mass of the corresponding state
// drops below max_tail. Convenience for sizing working spaces.
int squeezed_vacuum_levels(double r, double max_tail = kDefaultMaxTail);
int odd_cat_levels(double alpha, double max_tail = kDefaultMaxTail);

// Phase-space rotation exp(i theta n̂): c_n -> e^{i n theta} c_n.
PureState rotated(const PureState& psi, double theta);
DensityMatrix rotated(const DensityMatrix& rho, double theta);

// ---------------------------------------------------------------------------
// Channels and measurements
// ---------------------------------------------------------------------------

struct HeraldResult {
    DensityMatrix state;
    double success_probability;
};

// Photon subtraction: tap beamsplitter of reflectivity R with vacuum in the
// idle port, click POVM 1 - |0><0| on the tap mode, conditional state of the
// transmitted mode. Exact in the truncated two-mode space. tap_levels < 0
// keeps the full tap space (k up to n_max); small values (e.g. 4) give the
// reduced-tap variant.
HeraldResult herald_subtract(const PureState& input, double R, int tap_levels = -1);
HeraldResult herald_subtract(const DensityMatrix& input, double R, int tap_levels = -1);

// Photon-loss channel of transmittance eta (generalized Bernoulli map):
// rho'_{mn} = sum_k sqrt(C(m+k,k) C(n+k,k)) eta^{(m+n)/2} (1-eta)^k rho_{m+k,n+k}.
DensityMatrix apply_loss(const DensityMatrix& rho, double eta);

// ---------------------------------------------------------------------------
// Phase-space and quadrature representations
// ---------------------------------------------------------------------------

// Point kernel K(x,p) with W_rho(x,p) = Re sum_{mn} rho_mn K_nm, i.e. the
// displaced-parity operator D(2a) Π / pi, a = (x+ip)/sqrt(2). The kernel is
// Hermitian; it doubles as the Wigner transform of |n><m| at (x,p).
Eigen::MatrixXcd wigner_kernel(int n_max, double x, double p);

// Wigner function of rho at a point / on a grid.
double wigner(const DensityMatrix& rho, double x, double p);
Eigen::MatrixXd wigner_grid(const DensityMatrix& rho,
                            const Eigen::VectorXd& xs,
                            const Eigen::VectorXd& ps);

// Hermite functions psi_0..psi_n at x (vacuum variance 1/2 convention,
// psi_0(x) = pi^{-1/4} exp(-x^2/2)).
Eigen::VectorXd hermite_functions(int n_max, double x);

// Probability density of the quadrature x_theta = x cos(theta) + p sin(theta):
// pr(x|theta) = sum_{mn} rho_mn e^{-i(m-n)theta} psi_m(x) psi_n(x).
double quadrature_pdf(const DensityMatrix& rho, double theta, double x);

// Second moment <x_theta^2> evaluated operator-side (ladder algebra); equals
// the Wigner-covariance prediction for the same quadrature.
double quadrature_variance(const DensityMatrix& rho, double theta);

// ---------------------------------------------------------------------------
// Figures of merit
// ---------------------------------------------------------------------------

// Pure-target overlap <psi|rho|psi>; the smaller space is zero-padded.
double fidelity(const DensityMatrix& rho, const PureState& psi);

// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 for two mixed states.
double fidelity_mixed(const DensityMatrix& rho, const DensityMatrix& sigma);

// diag(rho), clamped into [0,1].
Eigen::VectorXd photon_distribution(const DensityMatrix& rho);

double mean_photon_number(const DensityMatrix& rho);

}  // namespace pscat::fock
