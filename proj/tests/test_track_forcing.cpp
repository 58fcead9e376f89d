#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "railsim/error.hpp"
#include "railsim/track_forcing.hpp"

using namespace railsim;

TEST_CASE("excitation frequency") {
    TrackProfile t;
    CHECK(excitation_frequency(t) == doctest::Approx(5.0265482457).epsilon(1e-10));
    t.speed = 0.0;
    CHECK(excitation_frequency(t) == 0.0);
    t.speed = 41.667;
    CHECK(excitation_frequency(t) == doctest::Approx(10.472).epsilon(1e-4));
    CHECK(kmh_to_mps(72.0) == doctest::Approx(20.0));
    t.wavelength = 0.0;
    try {
        (void)excitation_frequency(t);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kInvalidProfile);
    }
}

TEST_CASE("profile height and rate") {
    const TrackProfile t;
    CHECK(profile_height(0.0, t) == 0.0);
    CHECK(profile_height(0.3125, t) == doctest::Approx(0.003).epsilon(1e-12));
    CHECK(profile_rate(0.0, t) == doctest::Approx(0.05529203070).epsilon(1e-10));
}

TEST_CASE("rate matches central difference of height") {
    const TrackProfile t;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> time(-5.0, 5.0);
    const double h = 1e-6;
    for (int i = 0; i < 200; ++i) {
        const double s = time(rng);
        const double fd = (profile_height(s + h, t) - profile_height(s - h, t)) / (2.0 * h);
        const double exact = profile_rate(s, t);
        REQUIRE(std::abs(fd - exact) <= 1e-6 * std::max(std::abs(exact), 1e-3));
    }
}

TEST_CASE("wheel delays") {
    const VehicleParams p;
    TrackProfile t;
    const auto d = wheel_delays(p, t);
    CHECK(d.tau[0] == 0.0);
    CHECK(d.tau[1] == doctest::Approx(0.15).epsilon(1e-14));
    CHECK(d.tau[2] == doctest::Approx(0.3725).epsilon(1e-14));
    CHECK(d.tau[3] == doctest::Approx(0.5225).epsilon(1e-14));

    t.speed = 40.0;
    const auto d2 = wheel_delays(p, t);
    for (std::size_t i = 0; i < kWheelCount; ++i) CHECK(d2.tau[i] == doctest::Approx(d.tau[i] / 2.0));

    VehicleParams same = p;
    same.bogie_half_base = same.wagon_half_base;
    const auto d3 = wheel_delays(same, TrackProfile{});
    CHECK(d3.tau[1] == d3.tau[2]);

    t.speed = 0.0;
    try {
        (void)wheel_delays(p, t);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::kDelaysUndefined);
    }
}

TEST_CASE("wheel forcing samples") {
    const VehicleParams p;
    const TrackProfile t;
    const auto delays = wheel_delays(p, t);
    const auto s = wheel_forcing(0.0, t, delays);
    CHECK(s.eta[0] == 0.0);
    // Direct evaluation of eta(-0.15); the profile is odd in t.
    CHECK(s.eta[1] == doctest::Approx(-0.004963762015).epsilon(1e-9));
    CHECK(s.eta[1] == doctest::Approx(-profile_height(0.15, t)).epsilon(1e-14));

    TrackProfile flat = t;
    flat.amp1 = flat.amp2 = 0.0;
    const auto z = wheel_forcing(1.234, flat, delays);
    CHECK(z == ForcingSample{});

    const double period = 2.0 * std::numbers::pi / excitation_frequency(t);
    CHECK(period == doctest::Approx(1.25));
    const auto a = wheel_forcing(0.37, t, delays);
    const auto b = wheel_forcing(0.37 + period, t, delays);
    for (std::size_t i = 0; i < kWheelCount; ++i) {
        CHECK(a.eta[i] == doctest::Approx(b.eta[i]).epsilon(1e-12).scale(1e-12));
        CHECK(a.eta_rate[i] == doctest::Approx(b.eta_rate[i]).epsilon(1e-12).scale(1e-12));
    }
}

TEST_CASE("forcing invariants over random times") {
    const VehicleParams p;
    TrackProfile t;
    t.speed = 33.0;
    const auto delays = wheel_delays(p, t);
    const double w = excitation_frequency(t);
    const double period = t.wavelength / t.speed;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> time(-10.0, 10.0);
    for (int i = 0; i < 500; ++i) {
        const double s = time(rng);
        const auto f = wheel_forcing(s, t, delays);
        const auto g = wheel_forcing(s + period, t, delays);
        for (std::size_t k = 0; k < kWheelCount; ++k) {
            REQUIRE(std::abs(f.eta[k]) <= t.amp1 + t.amp2);
            REQUIRE(std::abs(f.eta_rate[k]) <= w * (t.amp1 + 3.0 * t.amp2) * (1.0 + 1e-12));
            REQUIRE(std::abs(f.eta[k] - g.eta[k]) <= 1e-12);
            const auto lead = wheel_forcing(s - delays.tau[k], t, delays);
            REQUIRE(f.eta[k] == lead.eta[0]);
            REQUIRE(f.eta_rate[k] == lead.eta_rate[0]);
        }
    }
}

TEST_CASE("forcing model disabled or stationary yields zero") {
    const VehicleParams p;
    TrackProfile t;
    CHECK(ForcingModel(p, t, false).at(0.7) == ForcingSample{});
    t.speed = 0.0;
    CHECK(ForcingModel(p, t).at(0.7) == ForcingSample{});
}
