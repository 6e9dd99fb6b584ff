#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "pscat/acquisim.hpp"
#include "pscat/calib.hpp"
#include "pscat/catanalysis.hpp"
#include "pscat/fock.hpp"
#include "pscat/gauss.hpp"
#include "pscat/tomo.hpp"

namespace pscat::io {

// Density matrix <-> {"n_max": int, "re": [[...]], "im": [[...]]}.
nlohmann::json density_to_json(const fock::DensityMatrix& rho);
fock::DensityMatrix density_from_json(const nlohmann::json& j);
void save_density(const fock::DensityMatrix& rho, const std::string& path);
fock::DensityMatrix load_density(const std::string& path);

// Wigner grid CSV with header "x,p,w".
void save_wigner_csv(const fock::DensityMatrix& rho, double extent, double step,
                     const std::string& path);

// Prediction records as CSV ("P_p,F_odd,alpha,w00") and JSON.
void save_predictions_csv(const std::vector<gauss::PredictionRecord>& recs,
                          const std::string& path);
nlohmann::json predictions_to_json(const std::vector<gauss::PredictionRecord>& recs);

// Measurement CSV for the fits: two columns (x,y) for the single-branch
// model, three (x,y,y2) for the two-branch models. First line is a header.
std::vector<calib::FitPoint> load_fit_csv(const std::string& path, bool two_branch);

nlohmann::json fit_to_json(const calib::FitResult& fit, calib::FitModel model);

nlohmann::json analysis_to_json(const cat::AnalysisReport& rep);

nlohmann::json reconstruction_to_json(const tomo::ReconstructionResult& res, int bin_size);

void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

}  // namespace pscat::io
