#include "pscat/acquisim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <Eigen/Dense>
#include "json.hpp"

namespace pscat::acq {

namespace {

constexpr int kGridPoints = 4096;
constexpr double kGridExtent = 8.0;  // Wigner units
constexpr const char* kRngName = "mt19937_64";

inline double uniform01(std::mt19937_64& rng) {
    return (rng() >> 11) * (1.0 / 9007199254740992.0);  // 53-bit mantissa
}

// Tabulated quadrature distributions of one state on the x grid, folded over
// the coherence index d = m - n so that a phase evaluation is a handful of
// vector operations:
//   pr(x|theta) = S_0(x) + 2 sum_{d>=1} [cos(d theta) Re S_d + sin(d theta) Im S_d]
class PdfTable {
  public:
    explicit PdfTable(const fock::DensityMatrix& rho) {
        const int N = rho.n_max();
        xs_.resize(kGridPoints);
        const double h = 2.0 * kGridExtent / (kGridPoints - 1);
        Eigen::MatrixXd psi(N + 1, kGridPoints);
        for (int g = 0; g < kGridPoints; ++g) {
            xs_(g) = -kGridExtent + g * h;
            psi.col(g) = fock::hermite_functions(N, xs_(g));
        }
        for (int d = 0; d <= N; ++d) {
            Eigen::VectorXd re = Eigen::VectorXd::Zero(kGridPoints);
            Eigen::VectorXd im = Eigen::VectorXd::Zero(kGridPoints);
            double mag = 0.0;
            for (int n = 0; n + d <= N; ++n) {
                const fock::Cplx c = rho(n + d, n);
                if (std::abs(c) < 1e-16) continue;
                mag += std::abs(c);
                const Eigen::ArrayXd prod = psi.row(n + d).array() * psi.row(n).array();
                re += (c.real() * prod).matrix();
                im += (c.imag() * prod).matrix();
            }
            if (d == 0 || mag > 0.0) {
                ds_.push_back(d);
                res_.push_back(std::move(re));
                ims_.push_back(std::move(im));
            }
        }
    }

    // CDF over the grid at a given phase; reuses caller-provided storage.
    void cdf_at(double theta, Eigen::VectorXd& pdf, Eigen::VectorXd& cdf) const {
        pdf = res_[0];
        for (std::size_t k = 1; k < ds_.size(); ++k) {
            const double dt = ds_[k] * theta;
            pdf.noalias() += (2.0 * std::cos(dt)) * res_[k];
            pdf.noalias() += (2.0 * std::sin(dt)) * ims_[k];
        }
        pdf = pdf.cwiseMax(0.0);
        const double h = xs_(1) - xs_(0);
        cdf.resize(kGridPoints);
        cdf(0) = 0.0;
        for (int g = 1; g < kGridPoints; ++g)
            cdf(g) = cdf(g - 1) + 0.5 * h * (pdf(g - 1) + pdf(g));
        cdf /= cdf(kGridPoints - 1);
    }

    // Inverse CDF with linear interpolation; returns x in Wigner units.
    double invert(const Eigen::VectorXd& cdf, double u) const {
        const double* begin = cdf.data();
        const double* it = std::upper_bound(begin + 1, begin + kGridPoints, u);
        const int g = static_cast<int>(it - begin);
        const int hi = std::min(g, kGridPoints - 1);
        const double c0 = cdf(hi - 1), c1 = cdf(hi);
        const double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
        return xs_(hi - 1) + t * (xs_(hi) - xs_(hi - 1));
    }

  private:
    Eigen::VectorXd xs_;
    std::vector<int> ds_;
    std::vector<Eigen::VectorXd> res_;
    std::vector<Eigen::VectorXd> ims_;
};

void validate(const AcquisitionConfig& cfg) {
    if (cfg.n_segments < cfg.bin_size)
        throw std::invalid_argument("AcquisitionConfig: n_segments must be >= bin_size");
    if (!(cfg.phase_span > 0.0))
        throw std::invalid_argument("AcquisitionConfig: phase_span must be > 0");
    if (!(cfg.xi >= 0.0 && cfg.xi <= 1.0))
        throw std::invalid_argument("AcquisitionConfig: xi must lie in [0,1]");
    if (!(cfg.eta_hd >= 0.0 && cfg.eta_hd <= 1.0))
        throw std::invalid_argument("AcquisitionConfig: eta_hd must lie in [0,1]");
    if (cfg.electronic_noise_variance < 0.0)
        throw std::invalid_argument("AcquisitionConfig: noise variance must be >= 0");
}

}  // namespace

double phase_of_sample(int i, const AcquisitionConfig& cfg) {
    if (i < 0 || i >= cfg.n_segments)
        throw std::invalid_argument("phase_of_sample: index out of range");
    if (cfg.n_segments == 1) return 0.0;
    return cfg.phase_span * static_cast<double>(i) / (cfg.n_segments - 1);
}

double effective_modal_purity(double xi_filter, double trigger_rate_hz, double dark_rate_hz) {
    if (!(xi_filter >= 0.0 && xi_filter <= 1.0))
        throw std::invalid_argument("effective_modal_purity: xi_filter must lie in [0,1]");
    if (dark_rate_hz < 0.0 || trigger_rate_hz <= 0.0)
        throw std::invalid_argument("effective_modal_purity: rates out of domain");
    if (trigger_rate_hz <= dark_rate_hz)
        throw DegenerateRates("effective_modal_purity: trigger rate below dark rate");
    return xi_filter * (1.0 - dark_rate_hz / trigger_rate_hz);
}

QuadratureDataset sample_quadratures(const fock::DensityMatrix& rho_signal,
                                     const fock::DensityMatrix& rho_false,
                                     const AcquisitionConfig& cfg) {
    validate(cfg);
    const fock::DensityMatrix sig =
        cfg.eta_hd < 1.0 ? fock::apply_loss(rho_signal, cfg.eta_hd) : rho_signal;
    const fock::DensityMatrix fls =
        cfg.eta_hd < 1.0 ? fock::apply_loss(rho_false, cfg.eta_hd) : rho_false;

    const PdfTable signal_table(sig);
    const PdfTable false_table(fls);

    std::mt19937_64 rng(cfg.seed);
    QuadratureDataset ds;
    ds.config = cfg;
    ds.rng_name = kRngName;
    ds.samples.reserve(cfg.n_segments);

    Eigen::VectorXd pdf, cdf;
    const double to_shot_units = std::sqrt(2.0);
    const double noise_sd =
        cfg.electronic_noise_variance > 0.0 ? std::sqrt(cfg.electronic_noise_variance) : 0.0;
    for (int i = 0; i < cfg.n_segments; ++i) {
        const double theta = phase_of_sample(i, cfg);
        const double pick = uniform01(rng);
        const PdfTable& table = pick < cfg.xi ? signal_table : false_table;
        table.cdf_at(theta, pdf, cdf);
        const double u = uniform01(rng);
        double x = to_shot_units * table.invert(cdf, u);
        if (noise_sd > 0.0) {
            // Box-Muller from two further uniforms; only drawn when enabled so
            // noise-free runs keep their sample streams.
            const double u1 = std::max(uniform01(rng), 1e-300);
            const double u2 = uniform01(rng);
            x += noise_sd * std::sqrt(-2.0 * std::log(u1)) *
                 std::cos(2.0 * std::numbers::pi * u2);
        }
        ds.samples.push_back({i, theta, x});
    }
    return ds;
}

std::vector<double> sample_at_phase(const fock::DensityMatrix& rho, double theta, int n,
                                    std::uint64_t seed) {
    const PdfTable table(rho);
    Eigen::VectorXd pdf, cdf;
    table.cdf_at(theta, pdf, cdf);
    std::mt19937_64 rng(seed);
    std::vector<double> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i)
        out.push_back(std::sqrt(2.0) * table.invert(cdf, uniform01(rng)));
    return out;
}

void save_dataset(const QuadratureDataset& ds, const std::string& csv_path) {
    std::ofstream f(csv_path);
    if (!f) throw DataFormatError("save_dataset: cannot open " + csv_path);
    f << "segment,scan_phase,x\n";
    char buf[80];
    for (const auto& s : ds.samples) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", s.segment, s.scan_phase, s.x);
        f << buf;
    }
    nlohmann::json meta{{"n_segments", ds.config.n_segments},
                        {"phase_span", ds.config.phase_span},
                        {"bin_size", ds.config.bin_size},
                        {"seed", ds.config.seed},
                        {"eta_hd", ds.config.eta_hd},
                        {"xi", ds.config.xi},
                        {"dark_rate_hz", ds.config.dark_rate_hz},
                        {"trigger_rate_hz", ds.config.trigger_rate_hz},
                        {"electronic_noise_variance", ds.config.electronic_noise_variance},
                        {"rng", ds.rng_name},
                        {"signal_state", ds.signal_description},
                        {"false_state", ds.false_description}};
    std::ofstream m(csv_path + ".meta.json");
    m << meta.dump(2) << "\n";
}

QuadratureDataset load_dataset(const std::string& csv_path) {
    std::ifstream f(csv_path);
    if (!f) throw DataFormatError("load_dataset: cannot open " + csv_path);
    QuadratureDataset ds;
    std::string line;
    if (!std::getline(f, line) || line.rfind("segment,scan_phase,x", 0) != 0)
        throw DataFormatError("load_dataset: bad header in " + csv_path);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        Sample s;
        char* end = nullptr;
        s.segment = static_cast<int>(std::strtol(line.c_str(), &end, 10));
        if (!end || *end != ',') throw DataFormatError("load_dataset: bad row: " + line);
        s.scan_phase = std::strtod(end + 1, &end);
        if (!end || *end != ',') throw DataFormatError("load_dataset: bad row: " + line);
        s.x = std::strtod(end + 1, nullptr);
        ds.samples.push_back(s);
    }
    if (ds.samples.empty()) throw DataFormatError("load_dataset: no samples in " + csv_path);

    std::ifstream m(csv_path + ".meta.json");
    if (m) {
        nlohmann::json meta = nlohmann::json::parse(m, nullptr, true, true);
        ds.config.n_segments = meta.value("n_segments", static_cast<int>(ds.samples.size()));
        ds.config.phase_span = meta.value("phase_span", ds.config.phase_span);
        ds.config.bin_size = meta.value("bin_size", ds.config.bin_size);
        ds.config.seed = meta.value("seed", ds.config.seed);
        ds.config.eta_hd = meta.value("eta_hd", ds.config.eta_hd);
        ds.config.xi = meta.value("xi", ds.config.xi);
        ds.config.dark_rate_hz = meta.value("dark_rate_hz", 0.0);
        ds.config.trigger_rate_hz = meta.value("trigger_rate_hz", 1.0);
        ds.config.electronic_noise_variance = meta.value("electronic_noise_variance", 0.0);
        ds.rng_name = meta.value("rng", "");
        ds.signal_description = meta.value("signal_state", "");
        ds.false_description = meta.value("false_state", "");
    } else {
        ds.config.n_segments = static_cast<int>(ds.samples.size());
    }
    return ds;
}

}  // namespace pscat::acq
