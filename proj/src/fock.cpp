#include "pscat/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pscat::fock {

namespace {

constexpr double kPi = std::numbers::pi;

// sqrt(C(n,k)) table for n,k <= N, built by the Pascal recurrence on C.
Eigen::MatrixXd sqrt_binomial_table(int N) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int n = 0; n <= N; ++n) {
        c(n, 0) = 1.0;
        for (int k = 1; k <= n; ++k)
            c(n, k) = c(n, k - 1) * static_cast<double>(n - k + 1) / k;
    }
    return c.cwiseSqrt();
}

void check_efficiency(double eta, const char* what) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument(std::string(what) + ": efficiency must lie in [0,1]");
}

// Unnormalized squeezed-vacuum amplitudes c_{2k}; ratio recurrence keeps the
// factorials implicit. Returns amplitudes up to n_max and the analytic tail
// mass above n_max (total mass of the untruncated state is exactly 1).
std::pair<Eigen::VectorXcd, double> squeezed_amplitudes(double r, int n_max) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n_max + 1);
    const double t = std::tanh(r);
    double amp = 1.0 / std::sqrt(std::cosh(r));
    double head = 0.0;
    int k = 0;
    for (;; ++k) {
        const int n = 2 * k;
        if (n <= n_max) {
            c(n) = amp;
            head += amp * amp;
        } else {
            break;
        }
        amp *= -t * std::sqrt((2.0 * k + 1.0) / (2.0 * k + 2.0));
        if (amp == 0.0) break;
    }
    return {c, std::max(0.0, 1.0 - head)};
}

// Unnormalized odd-cat amplitudes u_n = alpha^n/sqrt(n!), n odd, plus the
// relative tail mass above n_max (full odd-sector mass is sinh(alpha^2)).
std::pair<Eigen::VectorXcd, double> odd_cat_amplitudes(double alpha, int n_max) {
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n_max + 1);
    const double a2 = alpha * alpha;
    double u = alpha;  // u_1
    double head = 0.0;
    for (int n = 1;; n += 2) {
        if (n <= n_max) {
            c(n) = u;
            head += u * u;
        } else {
            break;
        }
        u *= a2 / std::sqrt(static_cast<double>(n + 1) * (n + 2));
        if (u == 0.0) break;
    }
    const double full = std::sinh(a2);
    return {c, std::max(0.0, (full - head) / full)};
}

}  // namespace

// ---------------------------------------------------------------------------
// PureState / DensityMatrix
// ---------------------------------------------------------------------------

PureState::PureState(Eigen::VectorXcd coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 1) throw std::invalid_argument("PureState: empty coefficient vector");
    const double n = coeffs_.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::invalid_argument("PureState: coefficients not normalizable");
    coeffs_ /= n;
}

PureState PureState::truncated(int new_n_max) const {
    if (new_n_max >= n_max()) return padded(new_n_max);
    return PureState(coeffs_.head(new_n_max + 1));
}

PureState PureState::padded(int new_n_max) const {
    if (new_n_max <= n_max()) return *this;
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(new_n_max + 1);
    c.head(coeffs_.size()) = coeffs_;
    return PureState(std::move(c));
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd elements, double psd_tol) : m_(std::move(elements)) {
    if (m_.rows() != m_.cols() || m_.rows() < 1)
        throw std::invalid_argument("DensityMatrix: matrix must be square and nonempty");
    const double herm_err = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    if (herm_err > 1e-9)
        throw std::invalid_argument("DensityMatrix: not Hermitian (max deviation " +
                                    std::to_string(herm_err) + ")");
    m_ = 0.5 * (m_ + m_.adjoint().eval());
    const double tr = m_.trace().real();
    if (std::abs(tr - 1.0) > 1e-9)
        throw std::invalid_argument("DensityMatrix: trace " + std::to_string(tr) + " != 1");
    m_ /= tr;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
    const double min_ev = es.eigenvalues().minCoeff();
    if (min_ev < -psd_tol)
        throw std::invalid_argument("DensityMatrix: not positive semidefinite (min eigenvalue " +
                                    std::to_string(min_ev) + ")");
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    Eigen::MatrixXcd m = psi.coeffs() * psi.coeffs().adjoint();
    return DensityMatrix(std::move(m), unchecked_t{});
}

DensityMatrix DensityMatrix::padded(int new_n_max) const {
    if (new_n_max <= n_max()) return *this;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(new_n_max + 1, new_n_max + 1);
    m.topLeftCorner(dim(), dim()) = m_;
    return DensityMatrix(std::move(m), unchecked_t{});
}

DensityMatrix DensityMatrix::truncated(int new_n_max) const {
    if (new_n_max >= n_max()) return *this;
    Eigen::MatrixXcd m = m_.topLeftCorner(new_n_max + 1, new_n_max + 1);
    const double tr = m.trace().real();
    if (!(tr > 0.0)) throw std::invalid_argument("DensityMatrix::truncated: no mass kept");
    m /= tr;
    return DensityMatrix(std::move(m), unchecked_t{});
}

// ---------------------------------------------------------------------------
// State factories
// ---------------------------------------------------------------------------

PureState squeezed_vacuum(double r, int n_max, double max_tail) {
    if (r < 0.0) throw std::invalid_argument("squeezed_vacuum: r must be >= 0");
    if (n_max < 2) throw std::invalid_argument("squeezed_vacuum: n_max must be >= 2");
    auto [c, tail] = squeezed_amplitudes(r, n_max);
    if (tail >= max_tail)
        throw TruncationError("squeezed_vacuum: tail mass " + std::to_string(tail) +
                              " above n_max=" + std::to_string(n_max));
    return PureState(std::move(c));
}

PureState odd_cat(double alpha, int n_max, double max_tail) {
    if (!(alpha > 0.0)) throw std::invalid_argument("odd_cat: alpha must be > 0");
    if (n_max < 1) throw std::invalid_argument("odd_cat: n_max must be >= 1");
    auto [c, tail] = odd_cat_amplitudes(alpha, n_max);
    if (tail >= max_tail)
        throw TruncationError("odd_cat: tail mass " + std::to_string(tail) +
                              " above n_max=" + std::to_string(n_max));
    return PureState(std::move(c));
}

int squeezed_vacuum_levels(double r, double max_tail) {
    for (int n = 2;; n += 2)
        if (squeezed_amplitudes(r, n).second < max_tail) return n;
}

int odd_cat_levels(double alpha, double max_tail) {
    for (int n = 1;; n += 2)
        if (odd_cat_amplitudes(alpha, n).second < max_tail) return n;
}

PureState rotated(const PureState& psi, double theta) {
    Eigen::VectorXcd c = psi.coeffs();
    for (int n = 0; n < c.size(); ++n) c(n) *= std::polar(1.0, theta * n);
    return PureState(std::move(c));
}

DensityMatrix rotated(const DensityMatrix& rho, double theta) {
    const int d = rho.dim();
    Eigen::VectorXcd u(d);
    for (int n = 0; n < d; ++n) u(n) = std::polar(1.0, theta * n);
    Eigen::MatrixXcd m = u.asDiagonal() * rho.elements() * u.asDiagonal().toDenseMatrix().adjoint();
    return DensityMatrix(std::move(m));
}

// ---------------------------------------------------------------------------
// Channels and measurements
// ---------------------------------------------------------------------------

namespace {

// Joint amplitudes of (transmitted, tapped) photons for a pure input:
// psi_{m,k} = c_{m+k} sqrt(C(m+k,k)) T^{m/2} R^{k/2}. Returns the
// unnormalized conditional operator sum_{k>=1} psi_k psi_k^dag and the click
// probability.
std::pair<Eigen::MatrixXcd, double> herald_core(const Eigen::VectorXcd& c, double R,
                                                int tap_levels, const Eigen::MatrixXd& sqc) {
    const int N = static_cast<int>(c.size()) - 1;
    const double T = 1.0 - R;
    const int kmax = tap_levels < 0 ? N : std::min(N, tap_levels);
    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(N + 1, kmax + 1);
    for (int m = 0; m <= N; ++m) {
        const double tm = std::pow(T, 0.5 * m);
        for (int k = 0; k <= std::min(kmax, N - m); ++k)
            psi(m, k) = c(m + k) * sqc(m + k, k) * tm * std::pow(R, 0.5 * k);
    }
    if (kmax == 0) return {Eigen::MatrixXcd::Zero(N + 1, N + 1), 0.0};
    const auto clicked = psi.rightCols(kmax);
    return {clicked * clicked.adjoint(), clicked.squaredNorm()};
}

}  // namespace

HeraldResult herald_subtract(const PureState& input, double R, int tap_levels) {
    if (!(R > 0.0 && R < 1.0)) throw std::invalid_argument("herald_subtract: R must be in (0,1)");
    const int N = input.n_max();
    const auto sqc = sqrt_binomial_table(N);
    auto [op, p] = herald_core(input.coeffs(), R, tap_levels, sqc);
    if (p < 1e-12) throw HeraldImpossible("herald_subtract: click probability below 1e-12");
    return {DensityMatrix(op / p), p};
}

HeraldResult herald_subtract(const DensityMatrix& input, double R, int tap_levels) {
    if (!(R > 0.0 && R < 1.0)) throw std::invalid_argument("herald_subtract: R must be in (0,1)");
    const int N = input.n_max();
    const auto sqc = sqrt_binomial_table(N);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(input.elements());
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(N + 1, N + 1);
    double p = 0.0;
    for (int i = 0; i <= N; ++i) {
        const double lam = es.eigenvalues()(i);
        if (lam < 1e-14) continue;
        auto [opk, pk] = herald_core(es.eigenvectors().col(i), R, tap_levels, sqc);
        op += lam * opk;
        p += lam * pk;
    }
    if (p < 1e-12) throw HeraldImpossible("herald_subtract: click probability below 1e-12");
    return {DensityMatrix(op / p), p};
}

DensityMatrix apply_loss(const DensityMatrix& rho, double eta) {
    check_efficiency(eta, "apply_loss");
    if (eta == 1.0) return rho;
    const int N = rho.n_max();
    const auto sqc = sqrt_binomial_table(N);
    const double le = 1.0 - eta;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N + 1, N + 1);
    for (int m = 0; m <= N; ++m) {
        for (int n = m; n <= N; ++n) {
            Cplx s = 0.0;
            const double em = std::pow(eta, 0.5 * (m + n));
            double lk = 1.0;  // (1-eta)^k
            for (int k = 0; k <= N - n; ++k) {
                s += sqc(m + k, k) * sqc(n + k, k) * em * lk * rho(m + k, n + k);
                lk *= le;
            }
            out(m, n) = s;
            out(n, m) = std::conj(s);
        }
    }
    return DensityMatrix(std::move(out));
}

// ---------------------------------------------------------------------------
// Phase space
// ---------------------------------------------------------------------------

Eigen::MatrixXcd wigner_kernel(int n_max, double x, double p) {
    const int N = n_max;
    const Cplx beta = std::sqrt(2.0) * Cplx(x, p);
    const double t = std::norm(beta);
    const double et2 = std::exp(-0.5 * t);
    Eigen::MatrixXcd D(N + 1, N + 1);
    std::vector<double> lag(N + 1);
    Cplx bpow = 1.0;          // beta^d
    double inv_sqrt_dfac = 1.0;  // 1/sqrt(d!)
    for (int d = 0; d <= N; ++d) {
        // L_n^{(d)}(t), n = 0..N-d
        lag[0] = 1.0;
        if (N - d >= 1) lag[1] = 1.0 + d - t;
        for (int n = 1; n < N - d; ++n)
            lag[n + 1] = ((2.0 * n + 1.0 + d - t) * lag[n] - (n + d) * lag[n - 1]) / (n + 1.0);
        const Cplx upper = bpow * et2;                          // beta^d e^{-t/2}
        const Cplx lower = std::conj(bpow) * et2 * ((d % 2) ? -1.0 : 1.0);  // (-conj(beta))^d e^{-t/2}
        double fr = inv_sqrt_dfac;  // sqrt(n!/(n+d)!)
        for (int n = 0; n + d <= N; ++n) {
            D(n + d, n) = fr * upper * lag[n];
            if (d > 0) D(n, n + d) = fr * lower * lag[n];
            fr *= std::sqrt((n + 1.0) / (n + 1.0 + d));
        }
        bpow *= beta;
        inv_sqrt_dfac /= std::sqrt(d + 1.0);
    }
    for (int n = 0; n <= N; ++n)
        if (n % 2) D.col(n) = -D.col(n);
    return D / kPi;
}

double wigner(const DensityMatrix& rho, double x, double p) {
    const Eigen::MatrixXcd K = wigner_kernel(rho.n_max(), x, p);
    return rho.elements().transpose().cwiseProduct(K).sum().real();
}

Eigen::MatrixXd wigner_grid(const DensityMatrix& rho, const Eigen::VectorXd& xs,
                            const Eigen::VectorXd& ps) {
    Eigen::MatrixXd w(xs.size(), ps.size());
    const Eigen::MatrixXcd rt = rho.elements().transpose();
    for (Eigen::Index i = 0; i < xs.size(); ++i)
        for (Eigen::Index j = 0; j < ps.size(); ++j)
            w(i, j) = rt.cwiseProduct(wigner_kernel(rho.n_max(), xs(i), ps(j))).sum().real();
    return w;
}

Eigen::VectorXd hermite_functions(int n_max, double x) {
    Eigen::VectorXd psi(n_max + 1);
    psi(0) = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
    if (n_max >= 1) psi(1) = std::sqrt(2.0) * x * psi(0);
    for (int n = 1; n < n_max; ++n)
        psi(n + 1) = std::sqrt(2.0 / (n + 1.0)) * x * psi(n) - std::sqrt(n / (n + 1.0)) * psi(n - 1);
    return psi;
}

double quadrature_pdf(const DensityMatrix& rho, double theta, double x) {
    const int N = rho.n_max();
    const Eigen::VectorXd psi = hermite_functions(N, x);
    Eigen::VectorXcd u(N + 1);
    for (int n = 0; n <= N; ++n) u(n) = psi(n) * std::polar(1.0, theta * n);
    const Cplx v = u.adjoint() * rho.elements() * u;
    return std::max(0.0, v.real());
}

double quadrature_variance(const DensityMatrix& rho, double theta) {
    const int N = rho.n_max();
    Cplx a2 = 0.0;  // Tr[rho a^2]
    double nbar = 0.0;
    for (int m = 0; m <= N; ++m) {
        nbar += m * rho(m, m).real();
        if (m >= 2) a2 += std::sqrt(m * (m - 1.0)) * rho(m, m - 2);
    }
    return 0.5 * (2.0 * (std::polar(1.0, -2.0 * theta) * a2).real() + 2.0 * nbar + 1.0);
}

// ---------------------------------------------------------------------------
// Figures of merit
// ---------------------------------------------------------------------------

double fidelity(const DensityMatrix& rho, const PureState& psi) {
    const int N = std::max(rho.n_max(), psi.n_max());
    const DensityMatrix r = rho.padded(N);
    const Eigen::VectorXcd c = psi.padded(N).coeffs();
    const double f = (c.adjoint() * r.elements() * c)(0).real();
    return std::clamp(f, 0.0, 1.0);
}

double fidelity_mixed(const DensityMatrix& rho, const DensityMatrix& sigma) {
    const int N = std::max(rho.n_max(), sigma.n_max());
    const Eigen::MatrixXcd a = rho.padded(N).elements();
    const Eigen::MatrixXcd b = sigma.padded(N).elements();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXcd sq = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(sq * b * sq, Eigen::EigenvaluesOnly);
    const double s = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return std::clamp(s * s, 0.0, 1.0);
}

Eigen::VectorXd photon_distribution(const DensityMatrix& rho) {
    return rho.elements().diagonal().real().cwiseMax(0.0).cwiseMin(1.0);
}

double mean_photon_number(const DensityMatrix& rho) {
    double s = 0.0;
    for (int n = 0; n <= rho.n_max(); ++n) s += n * rho(n, n).real();
    return s;
}

}  // namespace pscat::fock
