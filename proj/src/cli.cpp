#include "pscat/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "pscat/acquisim.hpp"
#include "pscat/calib.hpp"
#include "pscat/catanalysis.hpp"
#include "pscat/io.hpp"
#include "pscat/tomo.hpp"

namespace pscat::cli {

double ExperimentConfig::xi_for_power(double P_p) const {
    const auto it = xi_per_power.find(P_p);
    return it == xi_per_power.end() ? 1.0 : it->second;
}

gauss::PredictConfig ExperimentConfig::predict_config(gauss::CorrectionView view,
                                                      double xi) const {
    gauss::PredictConfig p;
    p.gain_c = gain_c;
    p.tap_R = tap_R;
    p.eta_hd = eta_hd;
    p.eta_bs = eta_bs;
    p.eta_total = eta_alt;
    p.xi = xi;
    p.view = view;
    return p;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.pump_powers_mw = j.value("pump_powers_mw", c.pump_powers_mw);
    c.gain_c = j.value("gain_c", c.gain_c);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.tap_R = j.value("tap_R", c.tap_R);
    c.eta_hd = j.value("eta_hd", c.eta_hd);
    c.eta_bs = j.value("eta_bs", c.eta_bs);
    c.eta_alt = j.value("eta_alt", c.eta_alt);
    if (j.contains("xi_per_power"))
        for (const auto& [key, val] : j["xi_per_power"].items())
            c.xi_per_power[std::stod(key)] = val.get<double>();
    c.n_segments = j.value("n_segments", c.n_segments);
    c.n_max = j.value("n_max", c.n_max);
    c.predict_n_max = j.value("predict_n_max", c.predict_n_max);
    c.seed = j.value("seed", c.seed);
    c.phase_span = j.value("phase_span", c.phase_span);
    c.bin_size = j.value("bin_size", c.bin_size);
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json xi;
    for (const auto& [p, v] : xi_per_power) xi[std::to_string(p)] = v;
    return {{"pump_powers_mw", pump_powers_mw},
            {"gain_c", gain_c},
            {"epsilon", epsilon},
            {"tap_R", tap_R},
            {"eta_hd", eta_hd},
            {"eta_bs", eta_bs},
            {"eta_alt", eta_alt},
            {"xi_per_power", xi},
            {"n_segments", n_segments},
            {"n_max", n_max},
            {"predict_n_max", predict_n_max},
            {"seed", seed},
            {"phase_span", phase_span},
            {"bin_size", bin_size}};
}

ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) return {};
    return ExperimentConfig::from_json(io::load_json(path));
}

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
}

// Pre-detection states for one pump power: the heralded state and the
// false-trigger state (the squeezed beam after the tap). Detection loss is
// left to the sampler. The Fock space is enlarged until the squeezed input
// is represented faithfully.
std::pair<fock::DensityMatrix, fock::DensityMatrix> subtraction_states(
    const ExperimentConfig& cfg, double P_p) {
    const double r = cfg.gain_c * std::sqrt(P_p);
    const int n_work = std::max(cfg.n_max, fock::squeezed_vacuum_levels(r));
    const gauss::PredictConfig pc = cfg.predict_config(gauss::CorrectionView::AsMeasured);
    const fock::PureState sq = fock::squeezed_vacuum(r, n_work);
    const fock::DensityMatrix input =
        fock::apply_loss(fock::DensityMatrix::from_pure(sq), pc.input_efficiency());
    const fock::DensityMatrix heralded = fock::herald_subtract(input, cfg.tap_R).state;
    const fock::DensityMatrix false_mode = fock::apply_loss(input, 1.0 - cfg.tap_R);
    return {heralded, false_mode};
}

}  // namespace

int cmd_predict(const ExperimentConfig& cfg, const std::string& out_dir) {
    if (cfg.pump_powers_mw.empty())
        throw std::invalid_argument("predict: empty pump power list");
    ensure_dir(out_dir);
    std::vector<gauss::PredictionRecord> as_measured, corrected, fully;
    for (double P : cfg.pump_powers_mw) {
        as_measured.push_back(gauss::predict_state(
            P, cfg.predict_config(gauss::CorrectionView::AsMeasured), cfg.predict_n_max));
        corrected.push_back(gauss::predict_state(
            P, cfg.predict_config(gauss::CorrectionView::LossCorrected), cfg.predict_n_max));
        fully.push_back(gauss::predict_state(
            P, cfg.predict_config(gauss::CorrectionView::FullyCorrected), cfg.predict_n_max));
    }
    io::save_predictions_csv(as_measured, out_dir + "/predictions_as_measured.csv");
    io::save_predictions_csv(corrected, out_dir + "/predictions_loss_corrected.csv");
    io::save_predictions_csv(fully, out_dir + "/predictions_fully_corrected.csv");
    io::save_json({{"as_measured", io::predictions_to_json(as_measured)},
                   {"loss_corrected", io::predictions_to_json(corrected)},
                   {"fully_corrected", io::predictions_to_json(fully)},
                   {"config", cfg.to_json()}},
                  out_dir + "/predictions.json");
    return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, SimulateKind kind, double P_p_mw,
                 const std::string& out_csv, double xi_override) {
    acq::AcquisitionConfig ac;
    ac.n_segments = cfg.n_segments;
    ac.phase_span = cfg.phase_span;
    ac.bin_size = cfg.bin_size;
    ac.seed = cfg.seed;
    ac.eta_hd = cfg.eta_hd;

    acq::QuadratureDataset ds;
    const double r = cfg.gain_c * std::sqrt(P_p_mw);
    if (kind == SimulateKind::Squeezing) {
        // The squeezed beam as the homodyne sees it; everything upstream of
        // the detection chain is folded into the state before sampling.
        const int n_work = std::max(cfg.n_max, fock::squeezed_vacuum_levels(r));
        const fock::PureState sq = fock::squeezed_vacuum(r, n_work);
        const fock::DensityMatrix pre = fock::apply_loss(fock::DensityMatrix::from_pure(sq),
                                                         cfg.eta_alt / cfg.eta_hd);
        ac.xi = 1.0;
        ds = acq::sample_quadratures(pre, pre, ac);
        ds.signal_description = "squeezed vacuum, P_p=" + std::to_string(P_p_mw) + " mW";
        ds.false_description = ds.signal_description;
    } else {
        ac.xi = xi_override >= 0.0 ? xi_override : cfg.xi_for_power(P_p_mw);
        auto [signal, false_mode] = subtraction_states(cfg, P_p_mw);
        ds = acq::sample_quadratures(signal, false_mode, ac);
        ds.signal_description =
            "photon-subtracted squeezed vacuum, P_p=" + std::to_string(P_p_mw) + " mW";
        ds.false_description = "squeezed vacuum after tap, P_p=" + std::to_string(P_p_mw) + " mW";
    }
    acq::save_dataset(ds, out_csv);
    return 0;
}

int cmd_reconstruct(const std::string& dataset_csv, double eta, int n_max, int bin_size,
                    const std::string& out_json) {
    const acq::QuadratureDataset ds = acq::load_dataset(dataset_csv);
    const tomo::PhaseAssignment assignment =
        tomo::estimate_phases(ds, std::numeric_limits<double>::quiet_NaN(),
                              std::numeric_limits<double>::quiet_NaN(), bin_size);
    const tomo::PovmSet povm =
        tomo::build_povm(assignment, tomo::default_x_edges(), n_max, eta);
    const tomo::ReconstructionResult res = tomo::mle_reconstruct(ds, assignment, povm);
    io::save_json(io::reconstruction_to_json(res, bin_size), out_json);
    return 0;
}

int cmd_analyze(const std::string& rho_json, const std::string& out_prefix,
                double wigner_extent, double wigner_step) {
    nlohmann::json j = io::load_json(rho_json);
    double eta_corr = 1.0;
    if (j.contains("rho")) {  // accept a full reconstruction report
        eta_corr = j.value("eta_correction", 1.0);
        j = j["rho"];
    }
    const fock::DensityMatrix rho = io::density_from_json(j);
    const std::string source =
        eta_corr < 1.0 ? "reconstructed_loss_corrected" : "reconstructed";
    const cat::AnalysisReport rep = cat::analyze(rho, source);
    io::save_json(io::analysis_to_json(rep), out_prefix + "_report.json");
    io::save_wigner_csv(rho, wigner_extent, wigner_step, out_prefix + "_wigner.csv");
    return 0;
}

int cmd_fit(const std::string& kind, const std::string& csv_path, const std::string& out_json) {
    calib::FitModel model;
    if (kind == "shg")
        model = calib::FitModel::Shg;
    else if (kind == "gain")
        model = calib::FitModel::Gain;
    else if (kind == "squeezing")
        model = calib::FitModel::Squeezing;
    else
        throw std::invalid_argument("fit: unknown kind '" + kind + "'");
    const auto points = io::load_fit_csv(csv_path, model != calib::FitModel::Shg);
    const calib::FitResult fit = calib::fit_curve(model, points);
    io::save_json(io::fit_to_json(fit, model), out_json);
    return 0;
}

int cmd_wigner(const std::string& rho_json, double extent, double step,
               const std::string& out_csv) {
    nlohmann::json j = io::load_json(rho_json);
    if (j.contains("rho")) j = j["rho"];
    io::save_wigner_csv(io::density_from_json(j), extent, step, out_csv);
    return 0;
}

}  // namespace pscat::cli
