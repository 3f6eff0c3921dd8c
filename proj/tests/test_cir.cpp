#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pulsaloop/cir.hpp"
#include "pulsaloop/quadrature.hpp"

using namespace pulsaloop;

namespace {

constexpr double kL = 1e-3;
constexpr double kPi = std::numbers::pi;

double integrate(const std::function<double(double)>& f, double a, double b, std::size_t panels = 64) {
    quadrature::SimpsonOptions opt;
    opt.abs_tol = 1e-11;
    opt.panels = panels;
    return quadrature::adaptive_simpson(f, a, b, opt);
}

// Window mass from the Fourier series of the wrapped normal (Poisson summation):
// p(x) = (1/L)[1 + 2 Σ_k e^{−2π²k²σ²/L²} cos(2πk(x − μ)/L)].
double fourier_window_mass(double mu, double sigma, double L, const ReceiverSpec& rx, int terms = 2000) {
    double sum = rx.width / L;
    for (int k = 1; k <= terms; ++k) {
        const double decay = std::exp(-2.0 * kPi * kPi * k * k * sigma * sigma / (L * L));
        if (decay < 1e-300) break;
        const double w = 2.0 * kPi * k / L;
        sum += 2.0 * decay / (L * w) * (std::sin(w * (rx.upper() - mu)) - std::sin(w * (rx.lower() - mu)));
    }
    return sum;
}

Scenario make_scenario(HarmonicSeries series) {
    Scenario s;
    s.waveform = std::move(series);
    return s;
}

}  // namespace

TEST(WrappedPdf, LargeVarianceIsUniform) {
    const GaussianMoments m{1.0, 0.37e-3, (10 * kL) * (10 * kL)};
    for (double x : {0.0, 0.2e-3, 0.5e-3, 0.999e-3}) {
        EXPECT_NEAR(wrapped_pdf(m, kL, x) * kL, 1.0, 1e-9);
    }
}

TEST(WrappedPdf, NarrowPeakMatchesGaussian) {
    const double sigma = kL / 100;
    const GaussianMoments m{1.0, kL / 2, sigma * sigma};
    const double peak = 1.0 / std::sqrt(2 * kPi * sigma * sigma);
    EXPECT_NEAR(wrapped_pdf(m, kL, kL / 2) / peak, 1.0, 1e-12);
}

TEST(WrappedPdf, DegenerateThrows) {
    EXPECT_THROW(wrapped_pdf({1.0, 0.0, 0.0}, kL, 0.1e-3), degenerate_distribution);
    EXPECT_THROW(received_signal({1.0, 0.0, 0.0}, kL, ReceiverSpec{}), degenerate_distribution);
}

TEST(WrappedPdf, Normalization) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> mu(-5 * kL, 50 * kL), logsig(std::log(kL / 200), std::log(2 * kL));
    for (int i = 0; i < 20; ++i) {
        const double sigma = std::exp(logsig(rng));
        const GaussianMoments m{1.0, mu(rng), sigma * sigma};
        const double total = integrate([&](double x) { return wrapped_pdf(m, kL, x); }, 0.0, kL, 512);
        EXPECT_NEAR(total, 1.0, 1e-9) << m.mean << " " << sigma;
    }
}

TEST(WrappedPdf, TruncationSoundness) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unit(0.0, 1.0), logsig(std::log(kL / 500), std::log(3 * kL));
    const ImageTruncation base{};
    const ImageTruncation doubled{base.tol, 2 * detail::image_half_width(base)};
    for (int i = 0; i < 100; ++i) {
        const double sigma = std::exp(logsig(rng));
        const GaussianMoments m{1.0, 20 * kL * unit(rng), sigma * sigma};
        const double x = kL * unit(rng);
        const double a = wrapped_pdf(m, kL, x, base);
        const double b = wrapped_pdf(m, kL, x, doubled);
        EXPECT_LT(std::abs(a - b) * kL, base.tol);
    }
}

TEST(WrappedPdf, Periodicity) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double sigma = kL * (0.01 + unit(rng));
        const GaussianMoments m{1.0, 3 * kL * unit(rng), sigma * sigma};
        const double x = kL * unit(rng);
        const double p = wrapped_pdf(m, kL, x);
        EXPECT_NEAR(wrapped_pdf(m, kL, x + kL), p, 1e-12 * p + 1e-9);
        // Shifting μ by a whole loop is the same distribution.
        const GaussianMoments shifted{1.0, m.mean + 7 * kL, m.variance};
        EXPECT_NEAR(wrapped_pdf(shifted, kL, x), p, 1e-9 * p + 1e-6);
    }
}

TEST(WrappedPdf, MonotoneFlattening) {
    const double mu = 0.4e-3;
    double prev = std::numeric_limits<double>::infinity();
    for (double sigma = kL / 200; sigma < 2 * kL; sigma *= 1.25) {
        const GaussianMoments m{1.0, mu, sigma * sigma};
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int i = 0; i < 2000; ++i) {
            const double p = wrapped_pdf(m, kL, kL * i / 2000.0);
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        EXPECT_LE(hi - lo, prev * (1 + 1e-12)) << sigma;
        prev = hi - lo;
    }
}

TEST(ReceivedSignal, LimitsAtReferenceDefaults) {
    const ReceiverSpec rx{};
    const GaussianMoments wide{1.0, 0.1e-3, (10 * kL) * (10 * kL)};
    EXPECT_NEAR(received_signal(wide, kL, rx), 0.1, 1e-6);
    EXPECT_NEAR(received_signal(wide, kL, rx) / rx.equilibrium_fraction(kL), 1.0, 1e-6);
    const GaussianMoments narrow{1.0, rx.center + 4 * kL, (kL / 1000) * (kL / 1000)};
    EXPECT_NEAR(received_signal(narrow, kL, rx), 1.0, 1e-12);
}

TEST(ReceivedSignal, MatchesQuadrature) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> mu(-3 * kL, 30 * kL), logsig(std::log(kL / 200), std::log(2 * kL));
    const ReceiverSpec rx{};
    for (int i = 0; i < 50; ++i) {
        const double sigma = std::exp(logsig(rng));
        const GaussianMoments m{1.0, mu(rng), sigma * sigma};
        const double q = integrate([&](double x) { return wrapped_pdf(m, kL, x); }, rx.lower(), rx.upper(), 16);
        EXPECT_NEAR(received_signal(m, kL, rx), q, 1e-9);
    }
}

TEST(ReceivedSignal, MatchesFourierSeries) {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> mu(-3 * kL, 30 * kL), logsig(std::log(kL / 50), std::log(2 * kL));
    for (const ReceiverSpec rx : {ReceiverSpec{}, ReceiverSpec{0.02e-3, 0.1e-3}, ReceiverSpec{0.97e-3, 0.1e-3}}) {
        for (int i = 0; i < 30; ++i) {
            const double sigma = std::exp(logsig(rng));
            const GaussianMoments m{1.0, mu(rng), sigma * sigma};
            EXPECT_NEAR(received_signal(m, kL, rx), fourier_window_mass(m.mean, sigma, kL, rx), 1e-12);
        }
    }
}

TEST(ReceivedSignal, SeamWindowIsSplit) {
    // Window [−0.05, 0.05] mm straddles x = 0; compare with quadrature on the two pieces.
    const ReceiverSpec rx{0.0, 0.1e-3};
    const GaussianMoments m{1.0, 2 * kL + 0.02e-3, (0.03e-3) * (0.03e-3)};
    const double q = integrate([&](double x) { return wrapped_pdf(m, kL, x); }, 0.95e-3, kL, 16) +
                     integrate([&](double x) { return wrapped_pdf(m, kL, x); }, 0.0, 0.05e-3, 16);
    EXPECT_NEAR(received_signal(m, kL, rx), q, 1e-9);
    EXPECT_NEAR(received_signal(m, kL, ReceiverSpec{0.5e-3, kL}), 1.0, 0.0);
}

TEST(Receiver, Validation) {
    EXPECT_THROW((ReceiverSpec{kL, 0.1e-3}).validate(kL), invalid_parameter);
    EXPECT_THROW((ReceiverSpec{-1e-6, 0.1e-3}).validate(kL), invalid_parameter);
    EXPECT_THROW((ReceiverSpec{0.3e-3, 0.0}).validate(kL), invalid_parameter);
    EXPECT_THROW((ReceiverSpec{0.3e-3, 2 * kL}).validate(kL), invalid_parameter);
    EXPECT_NO_THROW((ReceiverSpec{0.3e-3, kL}).validate(kL));
}

TEST(CirTimeseries, SteadyIsTimeInvariantModel) {
    const Scenario s = make_scenario(HarmonicSeries::steady(1e-4));
    const auto grid = uniform_grid(20.0, 400);
    const auto series = cir_timeseries(s, grid);
    EXPECT_EQ(series.label, "analytical");
    const double d_eff = effective_diffusion(s.waveform, s.geometry, s.transport, 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const GaussianMoments m{grid[i], 1e-4 * grid[i], 2 * d_eff * grid[i]};
        EXPECT_NEAR(series.value[i], received_signal(m, kL, s.receiver) / 0.1, 1e-12);
    }
}

TEST(CirTimeseries, HighFrequencyApproachesSteady) {
    const auto grid = window(TimeSeries{"", uniform_grid(20.0, 2000), std::vector<double>(2000)}, 2.0, 20.0).t;
    auto max_dev = [&](double f) {
        const Scenario s = make_scenario(make_sinusoidal(1e-4, 0.5, f));
        return compare_series(cir_timeseries(s, grid), steady_flow_reference(s, grid)).max_abs_error;
    };
    EXPECT_LT(max_dev(8.0), max_dev(0.5));
}

TEST(CirTimeseries, EquilibriumAtTwentySeconds) {
    // At t = 20 s the wrapped normal has not fully flattened: the first Fourier
    // mode still contributes about 1.1 %. Compare against the exact series value.
    const Scenario s = make_scenario(make_sinusoidal(1e-4, 0.5, 0.5));
    const auto v = cir_timeseries(s, {20.0}).value[0];
    const auto m = closed_form_moments(s.waveform, s.geometry, s.transport, 20.0);
    EXPECT_NEAR(v, fourier_window_mass(m.mean, std::sqrt(m.variance), kL, s.receiver) / 0.1, 1e-12);
    EXPECT_NEAR(v, 1.0, 0.015);
    EXPECT_NEAR(cir_timeseries(s, {200.0}).value[0], 1.0, 1e-6);
}

TEST(CirTimeseries, GridValidation) {
    const Scenario s = make_scenario(HarmonicSeries::steady(1e-4));
    EXPECT_THROW(cir_timeseries(s, {0.0, 1.0}), invalid_parameter);
    EXPECT_THROW(cir_timeseries(s, {1.0, 1.0}), invalid_parameter);
    EXPECT_THROW(cir_timeseries(s, {2.0, 1.0}), invalid_parameter);
}

TEST(SteadyReference, DefinitionAndIndependence) {
    const auto grid = uniform_grid(20.0, 500);
    const Scenario sine = make_scenario(make_sinusoidal(1e-4, 0.5, 0.5));
    const auto ref = steady_flow_reference(sine, grid);
    EXPECT_EQ(ref.label, "steady");
    const auto explicit_steady = cir_timeseries(make_scenario(HarmonicSeries::steady(1e-4, 0.5)), grid);
    EXPECT_EQ(ref.value, explicit_steady.value);
    EXPECT_EQ(steady_flow_reference(make_scenario(make_pulsed(1e-4, 0.2, 4.0)), grid).value, ref.value);
    EXPECT_EQ(steady_flow_reference(make_scenario(make_physiological(1e-4)), grid).value, ref.value);
}

TEST(SteadyReference, PeakEarlierForFasterFlow) {
    const auto grid = uniform_grid(20.0, 2000);
    const auto slow = steady_flow_reference(make_scenario(HarmonicSeries::steady(1e-4)), grid);
    const auto fast = steady_flow_reference(make_scenario(HarmonicSeries::steady(2e-4)), grid);
    EXPECT_LT(slow.t[argmax(fast.value)], slow.t[argmax(slow.value)]);
}
