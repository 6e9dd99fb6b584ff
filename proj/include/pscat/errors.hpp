#pragma once

#include <stdexcept>
#include <string>

namespace pscat {

// Base class for all numerical/domain failures raised by the toolkit.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// State construction would lose more than the allowed probability mass.
struct TruncationError : Error {
    explicit TruncationError(const std::string& msg) : Error(msg) {}
};

// Click probability of a heralding measurement is (numerically) zero.
struct HeraldImpossible : Error {
    explicit HeraldImpossible(const std::string& msg) : Error(msg) {}
};

// Requested Gaussian state violates the uncertainty relation.
struct UncertaintyViolation : Error {
    explicit UncertaintyViolation(const std::string& msg) : Error(msg) {}
};

// Numerical quadrature lost normalization beyond tolerance.
struct QuadratureFailure : Error {
    explicit QuadratureFailure(const std::string& msg) : Error(msg) {}
};

// Curve fit failed to converge (or data are degenerate).
struct FitDiverged : Error {
    explicit FitDiverged(const std::string& msg) : Error(msg) {}
};

// Detector model queried with zero input signal.
struct NoSignal : Error {
    explicit NoSignal(const std::string& msg) : Error(msg) {}
};

// Trigger rate does not dominate the dark count rate.
struct DegenerateRates : Error {
    explicit DegenerateRates(const std::string& msg) : Error(msg) {}
};

// Dataset carries too little phase contrast to assign phases.
struct PhaseUnresolvable : Error {
    explicit PhaseUnresolvable(const std::string& msg) : Error(msg) {}
};

// Inverse-loss correction requested below the stable efficiency range.
struct IllConditionedCorrection : Error {
    explicit IllConditionedCorrection(const std::string& msg) : Error(msg) {}
};

// Reconstruction invoked on an empty dataset.
struct EmptyData : Error {
    explicit EmptyData(const std::string& msg) : Error(msg) {}
};

// Ξ fit cannot bring the model near the measured values anywhere in [0,1].
struct NoFit : Error {
    explicit NoFit(const std::string& msg) : Error(msg) {}
};

// Malformed or unreadable input file.
struct DataFormatError : Error {
    explicit DataFormatError(const std::string& msg) : Error(msg) {}
};

}  // namespace pscat
