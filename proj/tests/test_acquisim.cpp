#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "pscat/acquisim.hpp"
#include "pscat/fock.hpp"
#include "test_util.hpp"

using namespace pscat;

namespace {

constexpr double kPi = std::numbers::pi;

// Kolmogorov-Smirnov distance between samples (shot units) and the analytic
// quadrature CDF of rho at phase theta.
double ks_against_pdf(std::vector<double> xs, const fock::DensityMatrix& rho, double theta) {
    std::sort(xs.begin(), xs.end());
    const double h = 1e-3;
    double cdf = 0.0, x_grid = -8.0, d = 0.0;
    const double n = static_cast<double>(xs.size());
    std::size_t i = 0;
    for (; x_grid <= 8.0; x_grid += h) {
        // integrate the Wigner-units pdf; samples are sqrt(2) times wider
        cdf += fock::quadrature_pdf(rho, theta, x_grid) * h;
        const double x_shot = (x_grid + 0.5 * h) * std::sqrt(2.0);
        while (i < xs.size() && xs[i] <= x_shot) ++i;
        d = std::max(d, std::abs(i / n - cdf));
    }
    return d;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST_CASE("phase ramp") {
    acq::AcquisitionConfig cfg;
    cfg.n_segments = 4000;
    cfg.phase_span = 3.0 * kPi;
    CHECK(acq::phase_of_sample(0, cfg) == 0.0);
    CHECK(acq::phase_of_sample(3999, cfg) == doctest::Approx(3.0 * kPi));
    CHECK(acq::phase_of_sample(2000, cfg) ==
          doctest::Approx(3.0 * kPi * 2000.0 / 3999.0).epsilon(1e-12));
    CHECK_THROWS_AS(acq::phase_of_sample(-1, cfg), std::invalid_argument);
    CHECK_THROWS_AS(acq::phase_of_sample(4000, cfg), std::invalid_argument);
}

TEST_CASE("effective modal purity") {
    CHECK(acq::effective_modal_purity(1.0, 400.0, 2.0) == doctest::Approx(0.995));
    CHECK(acq::effective_modal_purity(0.9, 1000.0, 0.0) == doctest::Approx(0.9));
    CHECK_THROWS_AS(acq::effective_modal_purity(1.0, 1.0, 2.0), DegenerateRates);
}

TEST_CASE("sampling statistics") {
    SUBCASE("vacuum gives unit shot-noise variance") {
        const auto vac = test::fock_projector(0, 6);
        acq::AcquisitionConfig cfg;
        cfg.n_segments = 65200;
        cfg.bin_size = 100;
        cfg.seed = 12345;
        cfg.eta_hd = 1.0;
        const auto ds = acq::sample_quadratures(vac, vac, cfg);
        REQUIRE(ds.samples.size() == 65200);
        double s = 0.0, s2 = 0.0;
        for (const auto& q : ds.samples) {
            s += q.x;
            s2 += q.x * q.x;
        }
        const double mean = s / ds.samples.size();
        const double var = s2 / ds.samples.size() - mean * mean;
        CHECK(std::abs(var - 1.0) < 0.02);
    }
    SUBCASE("explicit electronic noise adds its variance") {
        const auto vac = test::fock_projector(0, 6);
        acq::AcquisitionConfig cfg;
        cfg.n_segments = 65200;
        cfg.bin_size = 100;
        cfg.seed = 12345;
        cfg.eta_hd = 1.0;
        cfg.electronic_noise_variance = 0.5;
        const auto ds = acq::sample_quadratures(vac, vac, cfg);
        double s2 = 0.0;
        for (const auto& q : ds.samples) s2 += q.x * q.x;
        CHECK(std::abs(s2 / ds.samples.size() - 1.5) < 0.03);
    }
    SUBCASE("same seed reproduces the dataset bit for bit") {
        const auto sq = fock::DensityMatrix::from_pure(fock::squeezed_vacuum(0.4, 15));
        acq::AcquisitionConfig cfg;
        cfg.n_segments = 500;
        cfg.bin_size = 100;
        cfg.seed = 99;
        const auto a = acq::sample_quadratures(sq, sq, cfg);
        const auto b = acq::sample_quadratures(sq, sq, cfg);
        REQUIRE(a.samples.size() == b.samples.size());
        for (std::size_t i = 0; i < a.samples.size(); ++i) {
            CHECK(a.samples[i].x == b.samples[i].x);
            CHECK(a.samples[i].scan_phase == b.samples[i].scan_phase);
        }
    }
    SUBCASE("fixed-phase draws match the analytic distribution") {
        // lossy photon-subtracted state, a distinctly non-Gaussian target
        const auto sub = fock::herald_subtract(fock::squeezed_vacuum(0.5, 15), 0.077).state;
        const auto lossy = fock::apply_loss(sub, 0.77);
        const auto xs = acq::sample_at_phase(lossy, 0.3, 100000, 2024);
        CHECK(ks_against_pdf(xs, lossy, 0.3) < 0.01);
    }
    SUBCASE("xi = 0 falls back to the false state") {
        const auto cat_like = fock::herald_subtract(fock::squeezed_vacuum(0.5, 15), 0.077).state;
        const auto sq = fock::DensityMatrix::from_pure(fock::squeezed_vacuum(0.5, 15));
        acq::AcquisitionConfig cfg;
        cfg.n_segments = 65200;
        cfg.bin_size = 100;
        cfg.eta_hd = 0.77;
        cfg.xi = 0.0;
        cfg.seed = 7;
        const auto mixed = acq::sample_quadratures(cat_like, sq, cfg);
        cfg.xi = 1.0;
        cfg.seed = 8;
        const auto direct = acq::sample_quadratures(sq, sq, cfg);
        std::vector<double> a, b;
        for (const auto& q : mixed.samples) a.push_back(q.x);
        for (const auto& q : direct.samples) b.push_back(q.x);
        CHECK(two_sample_ks(std::move(a), std::move(b)) < 0.01);
    }
    SUBCASE("squeezed-quadrature bins reproduce the variance model") {
        // P_p = 4 settings at total efficiency 0.62
        const double r = 0.28 * std::sqrt(4.0);
        const auto sq = fock::DensityMatrix::from_pure(fock::squeezed_vacuum(r, 20));
        const auto pre = fock::apply_loss(sq, 0.62 / 0.77);
        acq::AcquisitionConfig cfg;
        cfg.n_segments = 65200;
        cfg.bin_size = 100;
        cfg.eta_hd = 0.77;
        cfg.seed = 31415;
        const auto ds = acq::sample_quadratures(pre, pre, cfg);
        double s2 = 0.0;
        int n = 0;
        for (const auto& q : ds.samples) {
            const double folded = std::fmod(q.scan_phase, kPi);
            if (std::min(folded, kPi - folded) < 0.1) {
                s2 += q.x * q.x;
                ++n;
            }
        }
        REQUIRE(n > 1000);
        CHECK(std::abs(s2 / n - 0.582) < 0.05);
    }
}

TEST_CASE("dataset round-trip") {
    const auto sq = fock::DensityMatrix::from_pure(fock::squeezed_vacuum(0.3, 10));
    acq::AcquisitionConfig cfg;
    cfg.n_segments = 300;
    cfg.bin_size = 50;
    cfg.seed = 5;
    cfg.xi = 0.7;
    auto ds = acq::sample_quadratures(sq, sq, cfg);
    ds.signal_description = "roundtrip signal";
    ds.false_description = "roundtrip false";
    const std::string path = std::filesystem::temp_directory_path() / "pscat_rt.csv";
    acq::save_dataset(ds, path);
    const auto back = acq::load_dataset(path);
    REQUIRE(back.samples.size() == ds.samples.size());
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        CHECK(back.samples[i].segment == ds.samples[i].segment);
        CHECK(back.samples[i].scan_phase == ds.samples[i].scan_phase);  // bit-exact
        CHECK(back.samples[i].x == ds.samples[i].x);
    }
    CHECK(back.config.seed == cfg.seed);
    CHECK(back.config.xi == cfg.xi);
    CHECK(back.rng_name == "mt19937_64");
    CHECK(back.signal_description == "roundtrip signal");
    std::filesystem::remove(path);
    std::filesystem::remove(path + ".meta.json");
}

TEST_CASE("acquisition config validation") {
    const auto vac = test::fock_projector(0, 4);
    acq::AcquisitionConfig cfg;
    cfg.n_segments = 10;
    cfg.bin_size = 100;
    CHECK_THROWS_AS(acq::sample_quadratures(vac, vac, cfg), std::invalid_argument);
    cfg.n_segments = 200;
    cfg.phase_span = 0.0;
    CHECK_THROWS_AS(acq::sample_quadratures(vac, vac, cfg), std::invalid_argument);
    cfg.phase_span = 1.0;
    cfg.xi = 1.5;
    CHECK_THROWS_AS(acq::sample_quadratures(vac, vac, cfg), std::invalid_argument);
}
