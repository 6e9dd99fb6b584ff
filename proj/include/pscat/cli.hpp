#pragma once

#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"

#include "pscat/gauss.hpp"

namespace pscat::cli {

// One configuration drives every command; defaults reproduce the reference
// experiment (gain coefficient 0.28 mW^{-1/2}, 7.7% tap, 0.77 homodyne
// efficiency, 0.62 end-to-end efficiency).
struct ExperimentConfig {
    std::vector<double> pump_powers_mw{2.0, 4.0, 6.0, 8.0};
    double gain_c = 0.28;
    double epsilon = 0.77;
    double tap_R = 0.077;
    double eta_hd = 0.77;
    double eta_bs = 0.92;
    double eta_alt = 0.62;
    std::map<double, double> xi_per_power;  // optional herald purity per power
    int n_segments = 4000;
    int n_max = 15;          // reconstruction space
    int predict_n_max = 20;  // prediction space
    std::uint64_t seed = 1;
    double phase_span = 3.0 * std::numbers::pi;
    int bin_size = 100;

    double xi_for_power(double P_p) const;
    gauss::PredictConfig predict_config(gauss::CorrectionView view, double xi = 1.0) const;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

ExperimentConfig load_config(const std::string& path);  // empty path -> defaults

// Commands return 0 on success and throw on failure; main() maps exceptions
// to exit codes (2 usage, 3 data, 4 numerical).
int cmd_predict(const ExperimentConfig& cfg, const std::string& out_dir);

enum class SimulateKind { Squeezing, Subtraction };
int cmd_simulate(const ExperimentConfig& cfg, SimulateKind kind, double P_p_mw,
                 const std::string& out_csv, double xi_override = -1.0);

int cmd_reconstruct(const std::string& dataset_csv, double eta, int n_max, int bin_size,
                    const std::string& out_json);

int cmd_analyze(const std::string& rho_json, const std::string& out_prefix,
                double wigner_extent = 6.0, double wigner_step = 0.05);

int cmd_fit(const std::string& kind, const std::string& csv_path, const std::string& out_json);

int cmd_wigner(const std::string& rho_json, double extent, double step,
               const std::string& out_csv);

}  // namespace pscat::cli
