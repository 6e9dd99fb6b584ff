#include <cmath>
#include <random>

#include "doctest.h"
#include "pscat/calib.hpp"

using namespace pscat;

namespace {

std::vector<calib::FitPoint> synth_shg(const calib::ShgModelParams& p, double noise,
                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<calib::FitPoint> pts;
    for (double x = 2.0; x <= 100.0; x += 2.0) {
        const double y = calib::shg_efficiency(x, p);
        pts.push_back({x, y * (1.0 + noise * gauss(rng))});
    }
    return pts;
}

std::vector<calib::FitPoint> synth_gain(const calib::GainModelParams& p, double noise,
                                        std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<calib::FitPoint> pts;
    for (double x = 0.5; x <= 12.01; x += 0.2) {
        const auto [lo, hi] = calib::parametric_gain(x, p);
        pts.push_back({x, lo * (1.0 + noise * gauss(rng)), hi * (1.0 + noise * gauss(rng))});
    }
    return pts;
}

std::vector<calib::FitPoint> synth_squeezing(double c, double eta, double noise,
                                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<calib::FitPoint> pts;
    for (double x = 0.5; x <= 12.01; x += 0.2) {
        const auto [lo, hi] = calib::squeezing_variance(x, c, eta);
        pts.push_back({x, lo * (1.0 + noise * gauss(rng)), hi * (1.0 + noise * gauss(rng))});
    }
    return pts;
}

}  // namespace

TEST_CASE("scalar calibration models") {
    SUBCASE("second-harmonic efficiency") {
        const calib::ShgModelParams p{0.53, 0.18};
        CHECK(calib::shg_efficiency(33.0, p) == doctest::Approx(0.319).epsilon(2e-3));
        CHECK(calib::shg_efficiency(0.0, p) == 0.0);
        CHECK(calib::shg_efficiency(1e9, p) == doctest::Approx(p.eta_inf).epsilon(1e-9));
    }
    SUBCASE("parametric gain") {
        const calib::GainModelParams p{0.28, 0.77};
        const auto [gmin, gmax] = calib::parametric_gain(9.0, p);
        CHECK(gmin == doctest::Approx(0.374).epsilon(2e-3));
        CHECK(gmax > 1.0);
        const auto [g0min, g0max] = calib::parametric_gain(0.0, {0.28, 1.0});
        CHECK(g0min == doctest::Approx(1.0));
        CHECK(g0max == doctest::Approx(1.0));
        for (double P : {0.5, 2.0, 7.0}) {
            const auto [lo, hi] = calib::parametric_gain(P, p);
            CHECK(lo <= 1.0);
            CHECK(hi >= 1.0);
            CHECK(lo * hi >= 1.0);  // vacuum admixture only degrades purity
        }
        const auto [pl, ph] = calib::parametric_gain(3.0, {0.28, 1.0});
        CHECK(pl * ph == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("squeezing variances") {
        const auto [vmin, vmax] = calib::squeezing_variance(4.0, 0.28, 0.62);
        CHECK(vmin == doctest::Approx(0.582).epsilon(1e-3));
        CHECK(vmax == doctest::Approx(2.280).epsilon(1e-3));
        CHECK(10.0 * std::log10(vmin) == doctest::Approx(-2.35).epsilon(2e-3));
        const auto [v0min, v0max] = calib::squeezing_variance(5.0, 0.28, 0.0);
        CHECK(v0min == doctest::Approx(1.0));
        CHECK(v0max == doctest::Approx(1.0));
        const auto [v1min, v1max] = calib::squeezing_variance(0.0, 0.28, 1.0);
        CHECK(v1min == doctest::Approx(1.0));
        CHECK(v1max == doctest::Approx(1.0));
    }
    SUBCASE("homodyne efficiency budget") {
        CHECK(calib::homodyne_efficiency({0.90, 0.95, 0.95, 0.995}) ==
              doctest::Approx(0.7678).epsilon(2e-4));
        CHECK(calib::homodyne_efficiency({1, 1, 1, 1}) == doctest::Approx(1.0));
        CHECK(calib::homodyne_efficiency({0.9, 0.0, 0.95, 0.99}) == doctest::Approx(0.0));
    }
    SUBCASE("electronic noise equivalent efficiency") {
        CHECK(calib::electronic_noise_efficiency(23.0) == doctest::Approx(0.99499).epsilon(1e-4));
        CHECK(calib::electronic_noise_efficiency(0.0) == doctest::Approx(0.0));
        CHECK(calib::electronic_noise_efficiency(1e9) == doctest::Approx(1.0));
    }
    SUBCASE("shot-noise clearance") {
        const calib::DetectorModel d{13.6, 3.7};
        CHECK(calib::shot_noise_clearance(70e6, d) == doctest::Approx(24.1).epsilon(2e-3));
        CHECK(calib::shot_noise_clearance(1e6, d) ==
              doctest::Approx(10.0 * std::log10(13.6 / 3.7)).epsilon(1e-12));
        CHECK(calib::shot_noise_clearance(1e6, d) == doctest::Approx(5.65).epsilon(1e-3));
        CHECK_THROWS_AS(calib::shot_noise_clearance(0.0, d), NoSignal);
    }
}

TEST_CASE("fit_curve") {
    SUBCASE("noiseless data are recovered to high precision") {
        const auto shg = calib::fit_curve(calib::FitModel::Shg, synth_shg({0.53, 0.18}, 0, 1));
        CHECK(std::abs(shg.params[0] - 0.53) / 0.53 < 1e-6);
        CHECK(std::abs(shg.params[1] - 0.18) / 0.18 < 1e-6);
        CHECK(shg.residual_rms < 1e-9);

        const auto gain = calib::fit_curve(calib::FitModel::Gain, synth_gain({0.28, 0.77}, 0, 1));
        CHECK(std::abs(gain.params[0] - 0.28) / 0.28 < 1e-6);
        CHECK(std::abs(gain.params[1] - 0.77) / 0.77 < 1e-6);

        const auto sqz =
            calib::fit_curve(calib::FitModel::Squeezing, synth_squeezing(0.28, 0.62, 0, 1));
        CHECK(std::abs(sqz.params[0] - 0.28) / 0.28 < 1e-6);
        CHECK(std::abs(sqz.params[1] - 0.62) / 0.62 < 1e-6);
    }
    SUBCASE("one-percent noise stays within two percent") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto shg =
                calib::fit_curve(calib::FitModel::Shg, synth_shg({0.53, 0.18}, 0.01, seed));
            CHECK(std::abs(shg.params[0] - 0.53) / 0.53 < 0.02);
            CHECK(std::abs(shg.params[1] - 0.18) / 0.18 < 0.02);

            const auto gain =
                calib::fit_curve(calib::FitModel::Gain, synth_gain({0.28, 0.77}, 0.01, seed));
            CHECK(std::abs(gain.params[0] - 0.28) / 0.28 < 0.02);
            CHECK(std::abs(gain.params[1] - 0.77) / 0.77 < 0.02);
        }
    }
    SUBCASE("degenerate data are rejected") {
        std::vector<calib::FitPoint> twice{{3.0, 0.2}, {3.0, 0.21}, {3.0, 0.19}};
        CHECK_THROWS_AS(calib::fit_curve(calib::FitModel::Shg, twice), FitDiverged);
        std::vector<calib::FitPoint> two{{1.0, 0.1}, {2.0, 0.2}};
        CHECK_THROWS_AS(calib::fit_curve(calib::FitModel::Shg, two), std::invalid_argument);
        std::vector<calib::FitPoint> no_y2{{1.0, 0.9}, {2.0, 0.8}, {3.0, 0.7}};
        CHECK_THROWS_AS(calib::fit_curve(calib::FitModel::Gain, no_y2), std::invalid_argument);
    }
    SUBCASE("reported residual matches the injected noise scale") {
        const auto fit = calib::fit_curve(calib::FitModel::Shg, synth_shg({0.53, 0.18}, 0.01, 42));
        CHECK(fit.residual_rms > 1e-5);
        CHECK(fit.residual_rms < 0.05);
        CHECK(fit.n_points == 50);
    }
}
