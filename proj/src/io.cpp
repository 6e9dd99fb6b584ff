#include "pscat/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pscat::io {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

nlohmann::json density_to_json(const fock::DensityMatrix& rho) {
    const int d = rho.dim();
    std::vector<std::vector<double>> re(d, std::vector<double>(d));
    std::vector<std::vector<double>> im(d, std::vector<double>(d));
    for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
            re[m][n] = rho(m, n).real();
            im[m][n] = rho(m, n).imag();
        }
    return {{"n_max", rho.n_max()}, {"re", re}, {"im", im}};
}

fock::DensityMatrix density_from_json(const nlohmann::json& j) {
    if (!j.contains("n_max") || !j.contains("re") || !j.contains("im"))
        throw DataFormatError("density matrix JSON needs n_max/re/im");
    const int d = j["n_max"].get<int>() + 1;
    const auto& re = j["re"];
    const auto& im = j["im"];
    if (static_cast<int>(re.size()) != d || static_cast<int>(im.size()) != d)
        throw DataFormatError("density matrix JSON has inconsistent dimensions");
    Eigen::MatrixXcd m(d, d);
    for (int r = 0; r < d; ++r) {
        if (static_cast<int>(re[r].size()) != d || static_cast<int>(im[r].size()) != d)
            throw DataFormatError("density matrix JSON has ragged rows");
        for (int c = 0; c < d; ++c)
            m(r, c) = fock::Cplx(re[r][c].get<double>(), im[r][c].get<double>());
    }
    return fock::DensityMatrix(std::move(m), 1e-6);
}

void save_density(const fock::DensityMatrix& rho, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataFormatError("save_density: cannot open " + path);
    f << density_to_json(rho).dump(1) << "\n";
}

fock::DensityMatrix load_density(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataFormatError("load_density: cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw DataFormatError("load_density: " + std::string(e.what()));
    }
    return density_from_json(j);
}

void save_wigner_csv(const fock::DensityMatrix& rho, double extent, double step,
                     const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataFormatError("save_wigner_csv: cannot open " + path);
    f << "x,p,w\n";
    const int n = static_cast<int>(std::round(2.0 * extent / step)) + 1;
    for (int i = 0; i < n; ++i) {
        const double x = -extent + i * step;
        for (int j = 0; j < n; ++j) {
            const double p = -extent + j * step;
            f << fmt(x) << ',' << fmt(p) << ',' << fmt(fock::wigner(rho, x, p)) << '\n';
        }
    }
}

void save_predictions_csv(const std::vector<gauss::PredictionRecord>& recs,
                          const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataFormatError("save_predictions_csv: cannot open " + path);
    f << "P_p,F_odd,alpha,w00\n";
    for (const auto& r : recs)
        f << fmt(r.P_p) << ',' << fmt(r.F_odd) << ',' << fmt(r.alpha) << ',' << fmt(r.w00)
          << '\n';
}

nlohmann::json predictions_to_json(const std::vector<gauss::PredictionRecord>& recs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : recs)
        arr.push_back({{"P_p", r.P_p},
                       {"F_odd", r.F_odd},
                       {"alpha", r.alpha},
                       {"w00", r.w00},
                       {"success_prob", r.success_prob},
                       {"xi", r.xi}});
    return arr;
}

std::vector<calib::FitPoint> load_fit_csv(const std::string& path, bool two_branch) {
    std::ifstream f(path);
    if (!f) throw DataFormatError("load_fit_csv: cannot open " + path);
    std::string line;
    if (!std::getline(f, line)) throw DataFormatError("load_fit_csv: empty file " + path);
    std::vector<calib::FitPoint> pts;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) throw DataFormatError("load_fit_csv: bad cell: " + cell);
            vals.push_back(v);
        }
        const std::size_t want = two_branch ? 3 : 2;
        if (vals.size() != want)
            throw DataFormatError("load_fit_csv: expected " + std::to_string(want) +
                                  " columns, got " + std::to_string(vals.size()));
        calib::FitPoint p{vals[0], vals[1]};
        if (two_branch) p.y2 = vals[2];
        pts.push_back(p);
    }
    if (pts.empty()) throw DataFormatError("load_fit_csv: no data rows in " + path);
    return pts;
}

nlohmann::json fit_to_json(const calib::FitResult& fit, calib::FitModel model) {
    nlohmann::json params;
    switch (model) {
        case calib::FitModel::Shg:
            params = {{"eta_inf", fit.params[0]}, {"g", fit.params[1]}};
            break;
        case calib::FitModel::Gain:
            params = {{"c", fit.params[0]}, {"epsilon", fit.params[1]}};
            break;
        case calib::FitModel::Squeezing:
            params = {{"c", fit.params[0]}, {"eta", fit.params[1]}};
            break;
    }
    return {{"params", params}, {"residual_rms", fit.residual_rms}, {"n_points", fit.n_points}};
}

nlohmann::json analysis_to_json(const cat::AnalysisReport& rep) {
    nlohmann::json j{{"P_p", rep.P_p},
                     {"F_odd", rep.F_odd},
                     {"alpha_opt", rep.alpha_opt},
                     {"alpha_at_boundary", rep.alpha_at_boundary},
                     {"w00", rep.w00},
                     {"source", rep.source}};
    j["photon_dist"] = std::vector<double>(rep.photon_dist.data(),
                                           rep.photon_dist.data() + rep.photon_dist.size());
    if (rep.xi_fit) j["xi_fit"] = *rep.xi_fit;
    return j;
}

nlohmann::json reconstruction_to_json(const tomo::ReconstructionResult& res, int bin_size) {
    return {{"rho", density_to_json(res.rho)},
            {"iterations", res.iterations},
            {"final_ll", res.log_likelihood_trace.back()},
            {"converged", res.converged},
            {"eta_correction", res.eta_correction},
            {"n_max", res.rho.n_max()},
            {"bin_size", bin_size}};
}

void save_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataFormatError("save_json: cannot open " + path);
    f << j.dump(1) << "\n";
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataFormatError("load_json: cannot open " + path);
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw DataFormatError("load_json: " + std::string(e.what()));
    }
}

}  // namespace pscat::io
