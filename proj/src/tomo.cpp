#include "pscat/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pscat::tomo {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

struct BinStats {
    std::vector<double> variance;
    int n_bins;
};

int bin_count(const acq::QuadratureDataset& ds, int bin_size) {
    int max_seg = 0;
    for (const auto& s : ds.samples) max_seg = std::max(max_seg, s.segment);
    return std::max(1, max_seg / bin_size + 1);
}

// Mean-subtracted variance per phase bin; membership follows the segment
// index so that sample order is irrelevant.
BinStats bin_variances(const acq::QuadratureDataset& ds, int bin_size) {
    const int nb = bin_count(ds, bin_size);
    std::vector<double> sum(nb, 0.0), sum2(nb, 0.0);
    std::vector<int> cnt(nb, 0);
    for (const auto& s : ds.samples) {
        const int b = std::min(s.segment / bin_size, nb - 1);
        sum[b] += s.x;
        sum2[b] += s.x * s.x;
        ++cnt[b];
    }
    BinStats st;
    st.n_bins = nb;
    st.variance.resize(nb);
    for (int b = 0; b < nb; ++b) {
        if (cnt[b] < 2) throw std::invalid_argument("estimate_phases: phase bin with < 2 samples");
        const double m = sum[b] / cnt[b];
        st.variance[b] = sum2[b] / cnt[b] - m * m;
    }
    return st;
}

double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double t = pos - lo;
    return (1.0 - t) * v[lo] + t * v[hi];
}

double fold_quadrant(double phi) {
    double t = std::fmod(phi, std::numbers::pi);
    if (t < 0.0) t += std::numbers::pi;
    return t > kHalfPi ? std::numbers::pi - t : t;
}

}  // namespace

PhaseAssignment estimate_phases(const acq::QuadratureDataset& ds, double v_min, double v_max,
                                int bin_size) {
    if (bin_size < 2) throw std::invalid_argument("estimate_phases: bin_size must be >= 2");
    if (static_cast<int>(ds.samples.size()) < bin_size)
        throw std::invalid_argument("estimate_phases: fewer samples than one bin");
    const BinStats st = bin_variances(ds, bin_size);
    if (std::isnan(v_min)) v_min = percentile(st.variance, 0.02);
    if (std::isnan(v_max)) v_max = percentile(st.variance, 0.98);
    if (!(v_min > 0.0 && v_max >= v_min))
        throw std::invalid_argument("estimate_phases: need v_max >= v_min > 0");
    if (v_max - v_min < 0.05 * v_min)
        throw PhaseUnresolvable("estimate_phases: variance contrast below 5%");

    PhaseAssignment a;
    a.bin_size = bin_size;
    a.v_min = v_min;
    a.v_max = v_max;
    a.bins.reserve(st.n_bins);
    for (int b = 0; b < st.n_bins; ++b) {
        const double raw = (st.variance[b] - v_min) / (v_max - v_min);
        const bool clamped = raw < 0.0 || raw > 1.0;
        const double theta = std::asin(std::sqrt(std::clamp(raw, 0.0, 1.0)));
        a.bins.push_back({b, theta, st.variance[b], clamped});
    }
    return a;
}

PhaseAssignment assignment_from_scan(const acq::QuadratureDataset& ds, int bin_size) {
    if (bin_size < 1) throw std::invalid_argument("assignment_from_scan: bin_size must be >= 1");
    const BinStats st = bin_variances(ds, bin_size);
    std::vector<double> phase_sum(st.n_bins, 0.0);
    std::vector<int> cnt(st.n_bins, 0);
    for (const auto& s : ds.samples) {
        const int b = std::min(s.segment / bin_size, st.n_bins - 1);
        phase_sum[b] += s.scan_phase;
        ++cnt[b];
    }
    PhaseAssignment a;
    a.bin_size = bin_size;
    a.v_min = *std::min_element(st.variance.begin(), st.variance.end());
    a.v_max = *std::max_element(st.variance.begin(), st.variance.end());
    for (int b = 0; b < st.n_bins; ++b)
        a.bins.push_back({b, fold_quadrant(phase_sum[b] / cnt[b]), st.variance[b], false});
    return a;
}

// ---------------------------------------------------------------------------
// POVM construction
// ---------------------------------------------------------------------------

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGl = 16;
constexpr double kGlX[kGl] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGlW[kGl] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1895061045506850,
    0.1895061045506850, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

// ∫_a^b psi_m psi_n dx accumulated into g.
void accumulate_interval(Eigen::MatrixXd& g, int n_max, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < kGl; ++q) {
        const Eigen::VectorXd psi = fock::hermite_functions(n_max, mid + half * kGlX[q]);
        g.noalias() += (kGlW[q] * half) * (psi * psi.transpose());
    }
}

Eigen::MatrixXd tail_kernel(int n_max, double from, bool right) {
    // Integrate outward in unit panels until the Hermite functions underflow.
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
    const double span = std::max(8.0, std::sqrt(2.0 * n_max + 1.0) + 6.0 - std::abs(from));
    const int panels = static_cast<int>(std::ceil(span));
    for (int k = 0; k < panels; ++k) {
        const double a = std::abs(from) + k;
        accumulate_interval(g, n_max, a, a + 1.0);
    }
    if (!right) {  // mirror: psi_m(-x) psi_n(-x) = (-1)^{m+n} psi_m psi_n
        for (int m = 0; m <= n_max; ++m)
            for (int n = 0; n <= n_max; ++n)
                if ((m + n) % 2) g(m, n) = -g(m, n);
    }
    return g;
}

// Adjoint of the photon-loss channel applied to a measurement kernel:
// G'_{ab} = sum_k sqrt(C(a,k) C(b,k)) eta^{(a+b)/2-k} (1-eta)^k G_{a-k,b-k}.
Eigen::MatrixXd bernoulli_adjoint(const Eigen::MatrixXd& g, double eta) {
    const int N = static_cast<int>(g.rows()) - 1;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int n = 0; n <= N; ++n) {
        c(n, 0) = 1.0;
        for (int k = 1; k <= n; ++k)
            c(n, k) = c(n, k - 1) * static_cast<double>(n - k + 1) / k;
    }
    const Eigen::MatrixXd sqc = c.cwiseSqrt();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int a = 0; a <= N; ++a)
        for (int b = 0; b <= N; ++b) {
            double s = 0.0;
            for (int k = 0; k <= std::min(a, b); ++k)
                s += sqc(a, k) * sqc(b, k) * std::pow(eta, 0.5 * (a + b) - k) *
                     std::pow(1.0 - eta, k) * g(a - k, b - k);
            out(a, b) = s;
        }
    return out;
}

}  // namespace

Eigen::VectorXd default_x_edges(int n_bins, double extent) {
    return Eigen::VectorXd::LinSpaced(n_bins + 1, -extent, extent);
}

PovmSet build_povm(const PhaseAssignment& assignment, const Eigen::VectorXd& x_edges, int n_max,
                   double eta) {
    if (x_edges.size() < 2) throw std::invalid_argument("build_povm: need at least one bin");
    for (Eigen::Index i = 1; i < x_edges.size(); ++i)
        if (!(x_edges(i) > x_edges(i - 1)))
            throw std::invalid_argument("build_povm: edges must increase strictly");
    if (x_edges(0) > -6.0 || x_edges(x_edges.size() - 1) < 6.0)
        throw std::invalid_argument("build_povm: edges must cover [-6, 6]");
    if (!(eta <= 1.0)) throw std::invalid_argument("build_povm: eta must be <= 1");
    if (eta < 0.5)
        throw IllConditionedCorrection("build_povm: loss correction below eta = 0.5");

    PovmSet set;
    set.edges_ = x_edges;
    set.eta_ = eta;
    for (const auto& b : assignment.bins) set.thetas_.push_back(b.theta);

    const int nb = static_cast<int>(x_edges.size()) - 1;
    set.kernels_.resize(nb + 2);
    set.kernels_[0] = tail_kernel(n_max, x_edges(0), false);
    for (int j = 0; j < nb; ++j) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
        accumulate_interval(g, n_max, x_edges(j), x_edges(j + 1));
        set.kernels_[j + 1] = std::move(g);
    }
    set.kernels_[nb + 1] = tail_kernel(n_max, x_edges(nb), true);

    if (eta < 1.0)
        for (auto& g : set.kernels_) g = bernoulli_adjoint(g, eta);
    return set;
}

int PovmSet::bin_of(double x_wigner) const {
    if (x_wigner < edges_(0)) return 0;
    if (x_wigner >= edges_(edges_.size() - 1)) return n_xbins() - 1;
    const double* begin = edges_.data();
    const double* it = std::upper_bound(begin, begin + edges_.size(), x_wigner);
    return static_cast<int>(it - begin);  // interior bins start at index 1
}

Eigen::MatrixXcd PovmSet::element(int phase_idx, int xbin_idx) const {
    const Eigen::MatrixXd& g = kernels_[xbin_idx];
    const int N = n_max();
    Eigen::MatrixXcd e(N + 1, N + 1);
    const double th = thetas_[phase_idx];
    for (int m = 0; m <= N; ++m)
        for (int n = 0; n <= N; ++n) e(m, n) = g(m, n) * std::polar(1.0, th * (m - n));
    return e;
}

Eigen::MatrixXcd PovmSet::completeness(int phase_idx) const {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n_max() + 1, n_max() + 1);
    for (int j = 0; j < n_xbins(); ++j) s += element(phase_idx, j);
    return s;
}

// ---------------------------------------------------------------------------
// Maximum-likelihood reconstruction
// ---------------------------------------------------------------------------

namespace {

struct CountTable {
    // occupied (phase, xbin) cells only
    std::vector<int> phase;
    std::vector<int> xbin;
    std::vector<double> freq;
};

CountTable aggregate(const acq::QuadratureDataset& ds, const PhaseAssignment& assignment,
                     const PovmSet& povm) {
    const int nb = static_cast<int>(assignment.bins.size());
    const int nx = povm.n_xbins();
    std::vector<double> counts(static_cast<std::size_t>(nb) * nx, 0.0);
    for (const auto& s : ds.samples) {
        const int b = std::clamp(s.segment / assignment.bin_size, 0, nb - 1);
        const int j = povm.bin_of(s.x / std::sqrt(2.0));  // shot units -> Wigner units
        counts[static_cast<std::size_t>(b) * nx + j] += 1.0;
    }
    CountTable t;
    const double total = static_cast<double>(ds.samples.size());
    for (int b = 0; b < nb; ++b)
        for (int j = 0; j < nx; ++j) {
            const double c = counts[static_cast<std::size_t>(b) * nx + j];
            if (c > 0.0) {
                t.phase.push_back(b);
                t.xbin.push_back(j);
                t.freq.push_back(c / total);
            }
        }
    return t;
}

}  // namespace

ReconstructionResult mle_reconstruct(const acq::QuadratureDataset& ds,
                                     const PhaseAssignment& assignment, const PovmSet& povm,
                                     const MleOptions& options) {
    if (ds.samples.empty()) throw EmptyData("mle_reconstruct: empty dataset");
    if (assignment.bins.empty()) throw EmptyData("mle_reconstruct: empty phase assignment");
    const int d = povm.n_max() + 1;
    const int nb = static_cast<int>(assignment.bins.size());

    const CountTable table = aggregate(ds, assignment, povm);

    // Phase factors e^{i theta (m-n)} per phase bin, as full matrices.
    std::vector<Eigen::MatrixXcd> rot(nb), rot_conj(nb);
    for (int b = 0; b < nb; ++b) {
        Eigen::MatrixXcd u(d, d);
        const double th = assignment.bins[b].theta;
        for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n) u(m, n) = std::polar(1.0, th * (m - n));
        rot[b] = u;
        rot_conj[b] = u.conjugate();
    }

    // Log-likelihood of a state and the operator R = sum_j (f_j/p_j) Pi_j,
    // assembled per phase bin in the rotated frame where kernels are real.
    auto evaluate = [&](const Eigen::MatrixXcd& state, Eigen::MatrixXcd& R) {
        R.setZero(d, d);
        double ll = 0.0;
        std::size_t k = 0;
        for (int b = 0; b < nb; ++b) {
            if (k >= table.phase.size() || table.phase[k] != b) continue;
            const Eigen::MatrixXd rot_real = state.cwiseProduct(rot_conj[b]).real();
            Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d, d);
            for (; k < table.phase.size() && table.phase[k] == b; ++k) {
                const Eigen::MatrixXd& g = povm.kernel(table.xbin[k]);
                const double p = std::max(g.cwiseProduct(rot_real).sum(), 1e-300);
                ll += table.freq[k] * std::log(p);
                acc.noalias() += (table.freq[k] / p) * g;
            }
            R += rot[b].cwiseProduct(acc.cast<fock::Cplx>());
        }
        return ll;
    };

    auto step = [&](const Eigen::MatrixXcd& state, const Eigen::MatrixXcd& R, double dilution) {
        Eigen::MatrixXcd G = R;
        if (dilution < 1.0)
            G = dilution * R + (1.0 - dilution) * Eigen::MatrixXcd::Identity(d, d);
        Eigen::MatrixXcd next = G * state * G;
        next /= next.trace().real();
        return next;
    };

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(d, d) / d;
    Eigen::MatrixXcd R(d, d), R_next(d, d);
    double ll = evaluate(rho, R);
    std::vector<double> ll_trace{ll};
    bool converged = false;
    int it = 0;
    const double slack = 1e-12;

    for (it = 0; it < options.max_iter; ++it) {
        Eigen::MatrixXcd next = step(rho, R, 1.0);
        double ll_next = evaluate(next, R_next);
        if (ll_next < ll - slack * std::max(1.0, std::abs(ll))) {
            // Rare non-ascent step: damp until the likelihood stops dropping.
            bool ok = false;
            for (double eps = 0.5; eps > 1e-3; eps *= 0.5) {
                next = step(rho, R, eps);
                ll_next = evaluate(next, R_next);
                if (ll_next >= ll - slack * std::max(1.0, std::abs(ll))) {
                    ok = true;
                    break;
                }
            }
            if (!ok) break;  // keep the current iterate, flag non-convergence
        }
        rho = next;
        R.swap(R_next);
        ll_trace.push_back(ll_next);
        const bool settled = std::abs(ll_next - ll) <= options.rel_ll_change * std::abs(ll_next);
        ll = ll_next;
        if (settled) {
            converged = true;
            ++it;
            break;
        }
    }

    rho = 0.5 * (rho + rho.adjoint().eval());
    rho /= rho.trace().real();
    return {fock::DensityMatrix(std::move(rho)), std::move(ll_trace), it, converged,
            povm.eta_correction()};
}

}  // namespace pscat::tomo
