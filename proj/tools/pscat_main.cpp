#include <cstdio>
#include <exception>
#include <limits>
#include <string>

#include "CLI11.hpp"

#include "pscat/cli.hpp"
#include "pscat/errors.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pulsed photon-subtracted cat state toolkit: calibration fits, state "
                 "prediction, homodyne acquisition simulation, maximum-likelihood "
                 "tomography and cat-state analysis"};
    app.require_subcommand(1);

    std::string config_path, out = "out", dataset, rho_path, csv_path, kind;
    double power = 8.0, eta = 1.0, xi = -1.0, extent = 6.0, step = 0.05;
    int nmax = 15, bin_size = 100, segments = -1;
    std::uint64_t seed = 0;
    bool seed_set = false, segments_set = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option_function<std::uint64_t>(
               "--seed", [&](std::uint64_t s) { seed = s; seed_set = true; }, "RNG seed");
    };

    CLI::App* predict = app.add_subcommand("predict", "Predicted cat metrics per pump power");
    add_common(predict);
    predict->add_option("--out", out, "Output directory");

    CLI::App* simulate = app.add_subcommand("simulate", "Synthesize a homodyne dataset");
    add_common(simulate);
    simulate->add_option("--kind", kind, "squeezing | subtraction")->required();
    simulate->add_option("--power", power, "Pump power in mW");
    simulate->add_option("--xi", xi, "Herald modal purity override");
    simulate->add_option_function<int>(
        "--segments", [&](int s) { segments = s; segments_set = true; }, "Sample count");
    simulate->add_option("--out", out, "Output CSV path");

    CLI::App* reconstruct = app.add_subcommand("reconstruct", "Maximum-likelihood tomography");
    reconstruct->add_option("dataset", dataset, "Dataset CSV")->required();
    reconstruct->add_option("--eta", eta, "Efficiency folded into the POVMs (1 = none)");
    reconstruct->add_option("--nmax", nmax, "Fock truncation");
    reconstruct->add_option("--bin-size", bin_size, "Samples per phase bin");
    reconstruct->add_option("--out", out, "Output report JSON");

    CLI::App* analyze = app.add_subcommand("analyze", "Cat metrics and Wigner grid of a state");
    analyze->add_option("rho", rho_path, "Density matrix or reconstruction JSON")->required();
    analyze->add_option("--out", out, "Output path prefix");
    analyze->add_option("--extent", extent, "Wigner grid half-width");
    analyze->add_option("--step", step, "Wigner grid step");

    CLI::App* fit = app.add_subcommand("fit", "Calibration curve fit");
    fit->add_option("--kind", kind, "shg | gain | squeezing")->required();
    fit->add_option("csv", csv_path, "Measurement CSV")->required();
    fit->add_option("--out", out, "Output report JSON");

    CLI::App* wigner = app.add_subcommand("wigner", "Wigner grid CSV of a stored state");
    wigner->add_option("rho", rho_path, "Density matrix or reconstruction JSON")->required();
    wigner->add_option("--extent", extent, "Grid half-width");
    wigner->add_option("--step", step, "Grid step");
    wigner->add_option("--out", out, "Output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        pscat::cli::ExperimentConfig cfg = pscat::cli::load_config(config_path);
        if (seed_set) cfg.seed = seed;
        if (segments_set) cfg.n_segments = segments;

        if (predict->parsed()) return pscat::cli::cmd_predict(cfg, out);
        if (simulate->parsed()) {
            pscat::cli::SimulateKind k;
            if (kind == "squeezing")
                k = pscat::cli::SimulateKind::Squeezing;
            else if (kind == "subtraction")
                k = pscat::cli::SimulateKind::Subtraction;
            else
                throw std::invalid_argument("simulate: unknown kind '" + kind + "'");
            if (out == "out") out = "dataset.csv";
            return pscat::cli::cmd_simulate(cfg, k, power, out, xi);
        }
        if (reconstruct->parsed()) {
            if (out == "out") out = "reconstruction.json";
            return pscat::cli::cmd_reconstruct(dataset, eta, nmax, bin_size, out);
        }
        if (analyze->parsed()) {
            if (out == "out") out = "analysis";
            return pscat::cli::cmd_analyze(rho_path, out, extent, step);
        }
        if (fit->parsed()) {
            if (out == "out") out = "fit.json";
            return pscat::cli::cmd_fit(kind, csv_path, out);
        }
        if (wigner->parsed()) {
            if (out == "out") out = "wigner.csv";
            return pscat::cli::cmd_wigner(rho_path, extent, step, out);
        }
    } catch (const pscat::DataFormatError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return kExitData;
    } catch (const pscat::Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitUsage;
}
