#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "railsim/error.hpp"
#include "railsim/oracle.hpp"

using namespace railsim;

TEST_CASE("state-space matrices") {
    const VehicleParams p;
    const auto ss = build_state_space(p);
    for (std::size_t r : {0u, 2u, 4u, 6u}) {
        for (std::size_t c = 0; c < kStateSize; ++c) CHECK(ss.a[r][c] == (c == r + 1 ? 1.0 : 0.0));
        for (std::size_t c = 0; c < kInputSize; ++c) CHECK(ss.b[r][c] == 0.0);
    }
    CHECK(ss.a[kZkRate][kZk] == doctest::Approx(-93.333333333).epsilon(1e-10));

    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> dist(-0.05, 0.05);
    for (int trial = 0; trial < 1000; ++trial) {
        StateVector x;
        ForcingSample u;
        for (auto& v : x.values) v = dist(rng);
        for (std::size_t w = 0; w < kWheelCount; ++w) {
            u.eta[w] = dist(rng);
            u.eta_rate[w] = dist(rng);
        }
        const auto a = ss.apply(x, u);
        const auto b = derivative(x, u, p);
        double scale = 1.0;
        for (double v : b.values) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < kStateSize; ++i) REQUIRE(std::abs(a[i] - b[i]) <= 1e-12 * scale);
    }
}

TEST_CASE("complex solve") {
    SUBCASE("identity") {
        ComplexMatrix m(3);
        for (std::size_t i = 0; i < 3; ++i) m(i, i) = 1.0;
        const std::vector<Complex> rhs{{1.0, 2.0}, {-3.0, 0.5}, {0.0, -1.0}};
        CHECK(complex_solve(m, rhs) == rhs);
    }
    SUBCASE("diagonal") {
        ComplexMatrix m(2);
        m(0, 0) = 2.0;
        m(1, 1) = Complex{0.0, 1.0};
        const auto y = complex_solve(m, {Complex{2.0, 0.0}, Complex{0.0, 1.0}});
        CHECK(std::abs(y[0] - Complex{1.0, 0.0}) < 1e-15);
        CHECK(std::abs(y[1] - Complex{1.0, 0.0}) < 1e-15);
    }
    SUBCASE("constructed solution") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
            ComplexMatrix m(8);
            std::vector<Complex> y(8);
            for (std::size_t r = 0; r < 8; ++r) {
                y[r] = {dist(rng), dist(rng)};
                for (std::size_t c = 0; c < 8; ++c) m(r, c) = {dist(rng), dist(rng)};
                m(r, r) += 4.0;  // keep it well conditioned
            }
            const auto rhs = m.multiply(y);
            const auto got = complex_solve(m, rhs);
            for (std::size_t i = 0; i < 8; ++i) REQUIRE(std::abs(got[i] - y[i]) <= 1e-10);
            const auto back = m.multiply(got);
            double rnorm = 0.0, bnorm = 0.0;
            for (std::size_t i = 0; i < 8; ++i) {
                rnorm = std::max(rnorm, std::abs(back[i] - rhs[i]));
                bnorm = std::max(bnorm, std::abs(rhs[i]));
            }
            REQUIRE(rnorm <= 1e-10 * bnorm);
        }
    }
    SUBCASE("pivoting handles a zero leading entry") {
        ComplexMatrix m(2);
        m(0, 1) = 1.0;
        m(1, 0) = 1.0;
        const auto y = complex_solve(m, {Complex{3.0}, Complex{4.0}});
        CHECK(y[0] == Complex{4.0});
        CHECK(y[1] == Complex{3.0});
    }
    SUBCASE("singular") {
        ComplexMatrix m(2);
        m(0, 0) = 1.0;
        m(0, 1) = 2.0;
        m(1, 0) = 2.0;
        m(1, 1) = 4.0;
        try {
            (void)complex_solve(m, {Complex{1.0}, Complex{1.0}});
            FAIL("expected singular");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kSingularMatrix);
        }
        CHECK_THROWS_AS(complex_solve(ComplexMatrix(17), std::vector<Complex>(17)), Error);
    }
}

TEST_CASE("track harmonics encode delays and rates") {
    const VehicleParams p;
    const TrackProfile t;
    const auto delays = wheel_delays(p, t);
    const auto h = track_harmonics(t, delays);
    REQUIRE(h.size() == 2);
    const double w = excitation_frequency(t);
    CHECK(h[0].angular_frequency == w);
    CHECK(h[1].angular_frequency == 3.0 * w);
    for (const auto& comp : h) {
        for (std::size_t k = 0; k < kWheelCount; ++k) {
            const Complex expected = Complex{0.0, comp.angular_frequency} * comp.input[k];
            CHECK(std::abs(comp.input[kWheelCount + k] - expected) < 1e-15);
        }
    }
    // Reconstructing the time signal from the phasors gives wheel_forcing back.
    for (double s : {0.0, 0.2, 1.7}) {
        const auto f = wheel_forcing(s, t, delays);
        for (std::size_t k = 0; k < kWheelCount; ++k) {
            double eta = 0.0, rate = 0.0;
            for (const auto& comp : h) {
                const Complex ph = std::exp(Complex{0.0, comp.angular_frequency * s});
                eta += (comp.input[k] * ph).real();
                rate += (comp.input[kWheelCount + k] * ph).real();
            }
            CHECK(eta == doctest::Approx(f.eta[k]).epsilon(1e-12).scale(1e-12));
            CHECK(rate == doctest::Approx(f.eta_rate[k]).epsilon(1e-12).scale(1e-12));
        }
    }
}

TEST_CASE("steady-state response properties") {
    const VehicleParams p;
    const auto ss = build_state_space(p);
    const TrackProfile t;
    const auto delays = wheel_delays(p, t);

    SUBCASE("zero amplitudes give zero response") {
        TrackProfile flat = t;
        flat.amp1 = flat.amp2 = 0.0;
        const auto r = steady_state_response(p, flat);
        CHECK(r.at(3.3) == StateVector{});
    }
    SUBCASE("uniform static lift is followed rigidly") {
        HarmonicComponent lift;
        lift.angular_frequency = 0.0;
        for (std::size_t k = 0; k < kWheelCount; ++k) lift.input[k] = 1.0;
        const auto r = steady_state_response(ss, std::span(&lift, 1));
        CHECK(r.amplitudes[0][kZ1].real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.amplitudes[0][kZ2].real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.amplitudes[0][kZk].real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(r.amplitudes[0][kPhi]) < 1e-12);
        for (std::size_t i : {1u, 3u, 5u, 7u}) CHECK(std::abs(r.amplitudes[0][i]) < 1e-12);
    }
    SUBCASE("negative frequency gives the conjugate response") {
        const auto h = track_harmonics(t, delays);
        HarmonicComponent neg = h[0];
        neg.angular_frequency = -neg.angular_frequency;
        for (auto& c : neg.input) c = std::conj(c);
        const auto pos = steady_state_response(ss, std::span(&h[0], 1));
        const auto negr = steady_state_response(ss, std::span(&neg, 1));
        for (std::size_t i = 0; i < kStateSize; ++i) {
            CHECK(std::abs(negr.amplitudes[0][i] - std::conj(pos.amplitudes[0][i])) <= 1e-14);
        }
    }
    SUBCASE("superposition of the two harmonics") {
        TrackProfile first = t, third = t;
        first.amp2 = 0.0;
        third.amp1 = 0.0;
        const auto both = steady_state_response(p, t);
        const auto r1 = steady_state_response(p, first);
        const auto r3 = steady_state_response(p, third);
        for (double s : {0.0, 0.4, 2.9, 55.5}) {
            const auto a = both.at(s), b = r1.at(s), c = r3.at(s);
            for (std::size_t i = 0; i < kStateSize; ++i) CHECK(std::abs(a[i] - (b[i] + c[i])) <= 1e-10);
        }
    }
    SUBCASE("singular resolvent is reported") {
        // Without springs the displacement columns vanish and A is singular,
        // so the zero-frequency resolvent cannot be inverted.
        StateSpace free_body = ss;
        for (auto& row : free_body.a) {
            for (std::size_t c = 0; c < kStateSize; c += 2) row[c] = 0.0;
        }
        HarmonicComponent dc;
        dc.angular_frequency = 0.0;
        dc.input[0] = 1.0;
        try {
            (void)steady_state_response(free_body, std::span(&dc, 1));
            FAIL("expected resonance error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::kResonanceUndamped);
        }
    }
}

TEST_CASE("amplitude estimation") {
    const double w = excitation_frequency(TrackProfile{});
    TimeSeries s;
    for (int i = 0; i <= 10000; ++i) {
        const double t = i * 1e-3;
        StateVector x;
        x[kZk] = 0.004 * std::sin(w * t);
        x[kPhi] = 0.25;
        x[kZ1] = 0.001 * std::cos(w * t + 0.3) + 0.0005 * std::sin(3.0 * w * t);
        s.push(t, x, ForcingSample{});
    }
    const auto zk = amplitude_from_series(s, kZk, 10.0, w);
    CHECK(std::abs(zk.fundamental - 0.004) <= 1e-6);
    CHECK(std::abs(zk.peak - 0.004) <= 1e-6);
    CHECK(zk.third < 1e-9);
    CHECK(zk.dominant == zk.fundamental);

    const auto flat = amplitude_from_series(s, kPhi, 10.0, w);
    CHECK(flat.peak == 0.0);
    CHECK(flat.fundamental < 1e-12);

    // window not a whole number of periods
    const auto mixed = amplitude_from_series(s, kZ1, 3.1, w);
    CHECK(mixed.fundamental == doctest::Approx(0.001).epsilon(1e-6));
    CHECK(mixed.third == doctest::Approx(0.0005).epsilon(1e-6));

    try {
        (void)amplitude_from_series(s, kZk, 2.0, w);  // shorter than two 1.25 s periods
        FAIL("expected insufficient window");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kInsufficientWindow);
    }
    CHECK_THROWS_AS(amplitude_from_series(s, kZk, 11.0, w), Error);
}

TEST_CASE("simulated tail matches the steady-state oracle") {
    const SimulationContext ctx;
    const auto series = integrate_fixed(StateVector{}, 0.0, 60.0, 1e-3, ctx, 1);
    const auto oracle = steady_state_response(ctx.vehicle, ctx.track);
    const double w = excitation_frequency(ctx.track);
    for (std::size_t i = 0; i < kStateSize; ++i) {
        const auto est = amplitude_from_series(series, i, 10.0, w);
        CAPTURE(i);
        CHECK(est.fundamental == doctest::Approx(oracle.amplitude(i, 0)).epsilon(0.01));
        CHECK(est.third == doctest::Approx(oracle.amplitude(i, 1)).epsilon(0.01));
    }
    double err = 0.0, peak = 0.0;
    for (std::size_t r = 50000; r < series.size(); ++r) {
        const auto ref = oracle.at(series.times[r]);
        err = std::max(err, std::abs(series.states[r][kZk] - ref[kZk]));
        peak = std::max(peak, std::abs(ref[kZk]));
    }
    CHECK(err <= 0.01 * peak);
}
