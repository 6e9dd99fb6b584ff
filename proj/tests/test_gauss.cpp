#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pscat/catanalysis.hpp"
#include "pscat/fock.hpp"
#include "pscat/gauss.hpp"

using namespace pscat;

namespace {

constexpr double kPi = std::numbers::pi;

// Fock-side equivalent of the as-measured prediction pipeline.
fock::DensityMatrix fock_pipeline(double r, double eta_in, double R, double eta_out, int n_max) {
    const fock::PureState sq = fock::squeezed_vacuum(r, n_max, 1e-3);
    fock::DensityMatrix rho = fock::DensityMatrix::from_pure(sq);
    if (eta_in < 1.0) rho = fock::apply_loss(rho, eta_in);
    rho = fock::herald_subtract(rho, R).state;
    if (eta_out < 1.0) rho = fock::apply_loss(rho, eta_out);
    return rho;
}

}  // namespace

TEST_CASE("squeezed_wigner") {
    SUBCASE("vacuum peak") {
        const auto vac = gauss::squeezed_wigner(1.0, 1.0);
        CHECK(vac.value(0, 0) == doctest::Approx(1.0 / kPi).epsilon(1e-12));
        CHECK(vac.value(1.0, -0.5) == doctest::Approx(std::exp(-1.25) / kPi).epsilon(1e-12));
    }
    SUBCASE("pure squeezed state keeps the vacuum peak height") {
        const double r = 0.56;
        const auto sq = gauss::squeezed_wigner(std::exp(-2 * r), std::exp(2 * r));
        CHECK(sq.value(0, 0) == doctest::Approx(1.0 / kPi).epsilon(1e-12));
    }
    SUBCASE("uncertainty gate") {
        CHECK_THROWS_AS(gauss::squeezed_wigner(0.9, 1.0), UncertaintyViolation);
        CHECK_NOTHROW(gauss::squeezed_wigner(0.5, 2.0));
    }
}

TEST_CASE("subtract_click") {
    SUBCASE("vacuum cannot herald") {
        const auto vac = gauss::squeezed_wigner(1.0, 1.0);
        CHECK_THROWS_AS(gauss::subtract_click(vac, 0.05), HeraldImpossible);
    }
    SUBCASE("weak tap limit is an odd state") {
        for (double r : {0.2, 0.5}) {
            const auto sq = gauss::squeezed_wigner(std::exp(-2 * r), std::exp(2 * r));
            const auto res = gauss::subtract_click(sq, 1e-4);
            CHECK(std::abs(res.state.value(0, 0) + 1.0 / kPi) < 1e-3);
        }
    }
    SUBCASE("agrees with the Fock-space herald everywhere") {
        const double r = 0.396, R = 0.077;
        const auto sq = gauss::squeezed_wigner(std::exp(-2 * r), std::exp(2 * r));
        const auto res = gauss::subtract_click(sq, R);
        const int N = 26;
        const auto fres = fock::herald_subtract(fock::squeezed_vacuum(r, N), R);
        CHECK(std::abs(res.success_probability - fres.success_probability) < 1e-8);
        double max_dw = 0.0;
        for (double x = -4.0; x <= 4.0; x += 0.25)
            for (double p = -4.0; p <= 4.0; p += 0.25)
                max_dw = std::max(
                    max_dw, std::abs(res.state.value(x, p) - fock::wigner(fres.state, x, p)));
        CHECK(max_dw < 1e-6);
    }
    SUBCASE("click probability grows with squeezing and tap") {
        double prev = 0.0;
        for (double r : {0.1, 0.3, 0.5, 0.7}) {
            const auto sq = gauss::squeezed_wigner(std::exp(-2 * r), std::exp(2 * r));
            const double p = gauss::subtract_click(sq, 0.077).success_probability;
            CHECK(p > prev);
            prev = p;
        }
        prev = 0.0;
        for (double R : {0.02, 0.05, 0.1, 0.15}) {
            const auto sq = gauss::squeezed_wigner(std::exp(-0.8), std::exp(0.8));
            const double p = gauss::subtract_click(sq, R).success_probability;
            CHECK(p > prev);
            prev = p;
        }
    }
    SUBCASE("weights renormalize to one") {
        const auto sq = gauss::squeezed_wigner(std::exp(-1.0), std::exp(1.0));
        const auto res = gauss::subtract_click(sq, 0.1);
        CHECK(res.state.weight_sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("mix_modal_purity") {
    const double r = 0.792;  // strongest-pump settings
    const auto sq = gauss::squeezed_wigner(std::exp(-2 * r), std::exp(2 * r));
    const auto sub = gauss::subtract_click(sq, 0.077).state;
    SUBCASE("endpoints") {
        const auto m1 = gauss::mix_modal_purity(sub, sq, 1.0);
        CHECK(m1.value(0.3, 0.2) == doctest::Approx(sub.value(0.3, 0.2)).epsilon(1e-15));
        const auto m0 = gauss::mix_modal_purity(sub, sq, 0.0);
        CHECK(m0.value(0.3, 0.2) == doctest::Approx(sq.value(0.3, 0.2)).epsilon(1e-15));
    }
    SUBCASE("zero crossing of the origin value matches the closed form") {
        const double ws = sq.value(0, 0), wout = sub.value(0, 0);
        const double xi_closed = ws / (ws - wout);
        double lo = 0.0, hi = 1.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double v = gauss::mix_modal_purity(sub, sq, mid).value(0, 0);
            (v > 0.0 ? lo : hi) = mid;
        }
        CHECK(std::abs(0.5 * (lo + hi) - xi_closed) < 1e-9);
    }
}

TEST_CASE("apply_gaussian_loss") {
    SUBCASE("identity and vacuum fixed point") {
        const auto sq = gauss::squeezed_wigner(std::exp(-1.0), std::exp(1.0));
        const auto same = gauss::apply_gaussian_loss(sq, 1.0);
        CHECK(same.value(0.7, -0.4) == doctest::Approx(sq.value(0.7, -0.4)).epsilon(1e-15));
        const auto vac = gauss::squeezed_wigner(1.0, 1.0);
        for (double eta : {0.3, 0.77}) {
            const auto out = gauss::apply_gaussian_loss(vac, eta);
            CHECK(out.value(0.5, 0.5) == doctest::Approx(vac.value(0.5, 0.5)).epsilon(1e-12));
        }
    }
    SUBCASE("lossy single photon at the origin") {
        // weak-tap subtraction of a barely squeezed state is the one-photon state
        const double r = 0.01;
        const auto sq = gauss::squeezed_wigner(std::exp(-2 * r), std::exp(2 * r));
        const auto sub = gauss::subtract_click(sq, 1e-6).state;
        const auto lossy = gauss::apply_gaussian_loss(sub, 0.77);
        CHECK(std::abs(lossy.value(0, 0) - (1.0 - 2.0 * 0.77) / kPi) < 2e-3);
    }
    SUBCASE("composition is exact") {
        const auto sq = gauss::squeezed_wigner(std::exp(-1.2), std::exp(1.2));
        const auto sub = gauss::subtract_click(sq, 0.09).state;
        const auto a = gauss::apply_gaussian_loss(gauss::apply_gaussian_loss(sub, 0.9), 0.6);
        const auto b = gauss::apply_gaussian_loss(sub, 0.54);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK((a.components()[i].cov - b.components()[i].cov).cwiseAbs().maxCoeff() < 1e-15);
            CHECK(a.components()[i].weight == doctest::Approx(b.components()[i].weight));
        }
    }
}

TEST_CASE("mixture_to_fock") {
    SUBCASE("vacuum") {
        const auto rho = gauss::mixture_to_fock(gauss::squeezed_wigner(1.0, 1.0), 10);
        CHECK(std::abs(rho(0, 0).real() - 1.0) < 1e-8);
        Eigen::MatrixXcd off = rho.elements();
        off(0, 0) = 0.0;
        CHECK(off.cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("squeezed state against the coefficient construction") {
        const double r = 0.4;
        const auto rho = gauss::mixture_to_fock(
            gauss::squeezed_wigner(std::exp(-2 * r), std::exp(2 * r)), 20);
        const auto expect = fock::DensityMatrix::from_pure(fock::squeezed_vacuum(r, 20));
        CHECK((rho.elements() - expect.elements()).cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("dual-path equivalence at the strongest pump") {
        const double r = 0.792, R = 0.077, eta_in = 0.62 / (0.77 * 0.92);
        const int N = 30;
        auto mix = gauss::apply_gaussian_loss(
            gauss::squeezed_wigner(std::exp(-2 * r), std::exp(2 * r)), eta_in);
        const auto sub = gauss::subtract_click(mix, R);
        const auto rho_g = gauss::mixture_to_fock(sub.state, N);
        const auto rho_f = fock_pipeline(r, eta_in, R, 1.0, N);
        CHECK(fock::fidelity_mixed(rho_g, rho_f) >= 0.9999);
    }
}

TEST_CASE("predict_state reproduces the reference experiment") {
    gauss::PredictConfig cfg;  // defaults: c=0.28, R=0.077, eta_hd=0.77, eta_bs=0.92, 0.62
    SUBCASE("2 mW as measured") {
        const auto rec = gauss::predict_state(2.0, cfg);
        CHECK(std::abs(rec.F_odd - 0.64) <= 0.03);
        CHECK(std::abs(rec.alpha - 0.87) <= 0.06);
        CHECK(std::abs(rec.w00 - (-0.09)) <= 0.02);
        CHECK(rec.success_prob > 0.0);
        CHECK(rec.success_prob < 1.0);
    }
    SUBCASE("8 mW as measured") {
        const auto rec = gauss::predict_state(8.0, cfg);
        CHECK(std::abs(rec.F_odd - 0.52) <= 0.03);
        CHECK(std::abs(rec.alpha - 1.32) <= 0.06);
        CHECK(std::abs(rec.w00 - (-0.03)) <= 0.02);
    }
    SUBCASE("4 mW loss-corrected") {
        cfg.view = gauss::CorrectionView::LossCorrected;
        const auto rec = gauss::predict_state(4.0, cfg);
        CHECK(std::abs(rec.F_odd - 0.74) <= 0.03);
        CHECK(std::abs(rec.alpha - 1.18) <= 0.06);
        CHECK(std::abs(rec.w00 - (-0.16)) <= 0.02);
    }
    SUBCASE("record invariants") {
        const auto rec = gauss::predict_state(6.0, cfg);
        CHECK(rec.F_odd >= 0.0);
        CHECK(rec.F_odd <= 1.0);
        CHECK(rec.alpha > 0.0);
    }
}
