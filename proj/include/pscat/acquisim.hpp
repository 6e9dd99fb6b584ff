#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "pscat/errors.hpp"
#include "pscat/fock.hpp"

namespace pscat::acq {

struct AcquisitionConfig {
    int n_segments = 4000;
    double phase_span = 3.0 * std::numbers::pi;  // saw-tooth scan range, radians
    int bin_size = 100;                          // samples per phase bin downstream
    std::uint64_t seed = 1;
    double eta_hd = 0.77;  // applied to both states before sampling
    double xi = 1.0;       // probability that a sample comes from the signal state
    double dark_rate_hz = 0.0;
    double trigger_rate_hz = 1.0;
    // Detector electronic noise is normally folded into eta_hd via its
    // equivalent efficiency; setting this adds explicit Gaussian noise of the
    // given variance (shot-noise units) to every sample instead.
    double electronic_noise_variance = 0.0;
};

struct Sample {
    int segment;
    double scan_phase;  // radians, as generated by the ramp
    double x;           // shot-noise units (vacuum variance = 1)
};

struct QuadratureDataset {
    std::vector<Sample> samples;
    AcquisitionConfig config;
    std::string rng_name;           // recorded for reproducibility
    std::string signal_description;
    std::string false_description;
};

// Linear phase ramp 0 -> phase_span across the acquisition.
double phase_of_sample(int i, const AcquisitionConfig& cfg);

// Herald purity after subtracting the accidental-trigger fraction:
// xi_filter * (1 - dark_rate/trigger_rate). Throws DegenerateRates when the
// trigger rate does not exceed the dark rate.
double effective_modal_purity(double xi_filter, double trigger_rate_hz, double dark_rate_hz);

// Phase-scanned homodyne record: each sample is drawn from the quadrature
// distribution of rho_signal with probability xi, otherwise from rho_false,
// at that sample's scan phase, by inverse-CDF lookup on a 4096-point grid
// over [-8, 8] (Wigner units). Detection loss eta_hd is applied to both
// states first. Deterministic for a fixed seed.
QuadratureDataset sample_quadratures(const fock::DensityMatrix& rho_signal,
                                     const fock::DensityMatrix& rho_false,
                                     const AcquisitionConfig& cfg);

// n draws from one state at one fixed phase; same sampling machinery.
std::vector<double> sample_at_phase(const fock::DensityMatrix& rho, double theta, int n,
                                    std::uint64_t seed);

// Dataset CSV ("segment,scan_phase,x") plus a JSON metadata sidecar. Values
// round-trip bit-exactly.
void save_dataset(const QuadratureDataset& ds, const std::string& csv_path);
QuadratureDataset load_dataset(const std::string& csv_path);

}  // namespace pscat::acq
