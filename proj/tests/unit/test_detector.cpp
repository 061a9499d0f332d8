#include <catch_amalgamated.hpp>

#include <random>

#include <geoguard.hpp>

#include "support/oracles.hpp"
#include "support/random_scenarios.hpp"

using namespace geoguard;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// One unsecure sensor at the origin, secure pair at (+-1000, 0), ROI chosen
// so that rho_L = Phi(-1) and rho_U = 1/2 under the reference constants.
ScenarioConfig bracket_scenario() {
    const double d_lo = 1e5 / std::sqrt(2.0);
    const double d_hi = 1e5;
    ScenarioConfig s;
    s.roi = {{0, 0.5 * (d_lo + d_hi)}, 0.5 * (d_hi - d_lo)};
    s.target = s.roi.center;
    s.sensors = {{1, {0, 0}, 1.0, NoiseModel::standard_gaussian(), false},
                 {2, {-1000, 0}, 1.0, NoiseModel::standard_gaussian(), true},
                 {3, {1000, 0}, 1.0, NoiseModel::standard_gaussian(), true}};
    s.p0 = 1.0;
    s.d0 = 1e5;
    s.gamma = 2.0;
    return s;
}

std::vector<DistanceEstimate> exact_estimates(const ScenarioConfig& s, const AttackAssignment& a) {
    std::vector<DistanceEstimate> est(s.sensors.size());
    for (std::size_t j = 0; j < s.sensors.size(); ++j) {
        est[j] = {attacked_distance(s, j, post_attack_prob(s, j, a.spec_for(s.sensors[j].id))), false};
    }
    return est;
}

}  // namespace

TEST_CASE("minimum distortion lambda", "[detector]") {
    const auto s = bracket_scenario();
    const DistanceBounds b{1e5 / std::sqrt(2.0), 1e5, 2000};
    const RhoBounds rho = rho_bounds(s, 0, b);
    CHECK_THAT(rho.lower, WithinRel(oracle::normal_cdf(-1.0), 1e-12));
    CHECK_THAT(rho.upper, WithinAbs(0.5, 1e-12));
    // kappa D0 P0^(1/gamma) (tau - F^{-1}(rho_L))^(-3/2) / (gamma sup f)
    const double expected = 0.005 * 1e5 * std::pow(2.0, -1.5) / (2.0 * oracle::normal_pdf(0.0));
    CHECK_THAT(lambda_j(s, 0, 0.005, b), WithinRel(expected, 1e-12));
    CHECK_THAT(lambda_j(s, 0, 0.005, b), WithinAbs(221.55, 0.01));
    CHECK_THAT(lambda_j(s, 0, 0.0005, b), WithinRel(0.1 * expected, 1e-12));
    CHECK_THROWS_AS(lambda_j(s, 0, 0.0, b), DomainError);

    const auto preset = paper_preset(1.0 / 25.0).scenario;
    const double lam = lambda_j(preset, 0, preset.kappa);
    for (const std::size_t j : preset.unsecure_indices()) {
        CHECK_THAT(lambda_j(preset, j, preset.kappa), WithinRel(lam, 1e-12));
    }
    CHECK_THAT(lambda_min(preset, preset.kappa), WithinRel(lam, 1e-12));
}

TEST_CASE("significant attacks move the distance by more than lambda", "[detector]") {
    std::mt19937_64 rng(101);
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        const auto s = testing_support::random_scenario(rng, {4, true, true});
        const auto attacks = testing_support::random_attacks(rng, s, 1.0);
        const DistanceBounds b = compute_distance_bounds(s);
        for (const auto& [id, spec] : attacks.by_id) {
            const std::size_t j = s.index_of(id);
            REQUIRE(check_significant(s, j, spec, s.kappa));
            REQUIRE(check_subtle(s, j, spec));
            const double d = true_distance(s, j);
            const double dt = attacked_distance(s, j, post_attack_prob(s, j, spec));
            REQUIRE(std::abs(dt - d) > lambda_j(s, j, s.kappa, b));
            ++checked;
        }
    }
    CHECK(checked > 300);
}

TEST_CASE("admissible delta", "[detector]") {
    const double a = 2 * 1e5 + 1000;
    const double bracket = std::sqrt(a) * std::sqrt((6 * 1e5 + 3 * 1000.0) / (2 * 2000) * (1000.0 / 2000 + 1) + 3) +
                           0.5 * std::sqrt(1000.0);
    CHECK_THAT(delta_admissible(1e5, 2000, 1000, 50), WithinRel(2500 / (bracket * bracket), 1e-12));
    CHECK(delta_admissible(1e5, 2000, 1000, 1e9) == 1000.0);
    // the defining inequality Phi(3 delta / 2) + delta / 2 < lambda
    for (const double lam : {10.0, 100.0, 1000.0}) {
        const double d = 0.999 * delta_admissible(1e5, 2000, 1000, lam);
        CHECK(phi_bound(1e5, 2000, 1000, 1.5 * d) + 0.5 * d < lam);
    }
    const auto preset = paper_preset(1.0 / 25.0).scenario;
    const double adm = delta_admissible(preset, preset.kappa);
    CHECK(adm > 0.0);
    CHECK(adm < 280.0);
}

TEST_CASE("exact-probability detection is error free", "[detector]") {
    std::mt19937_64 rng(202);
    for (int i = 0; i < 200; ++i) {
        const auto s = testing_support::random_scenario(rng, {5, true, true});
        const auto attacks = testing_support::random_attacks(rng, s);
        const double delta = 0.99 * delta_admissible(s, s.kappa);
        // admissible deltas are far below the angular step of any practical
        // circle discretization, so only the exact test is checked here
        const auto rep = detect_exact(s, {delta, DetectMethod::analytic, 3}, attacks);
        for (const auto& d : rep.decisions) {
            INFO("scenario " << i << " sensor " << d.id);
            REQUIRE(d.decision == (attacks.attacked(d.id) ? 1 : 0));
        }
    }
}

TEST_CASE("larger delta never flags more sensors", "[detector]") {
    std::mt19937_64 rng(303);
    for (int i = 0; i < 100; ++i) {
        const auto s = testing_support::random_scenario(rng, {6, true, true});
        const auto attacks = testing_support::random_attacks(rng, s);
        auto est = exact_estimates(s, attacks);
        std::normal_distribution<double> jitter(0.0, 1.0);
        for (auto& e : est) e.distance += s.upsilon() * 0.05 * jitter(rng);
        std::vector<int> prev;
        for (double delta = s.upsilon() * 0.01; delta < s.upsilon(); delta *= 1.5) {
            const auto rep = detect_from_estimates(s, {delta, DetectMethod::analytic, 3}, est);
            std::vector<int> now;
            for (const auto& d : rep.decisions) now.push_back(d.decision);
            for (std::size_t k = 0; k < prev.size(); ++k) REQUIRE(now[k] <= prev[k]);
            prev = now;
        }
    }
}

TEST_CASE("detection from data", "[detector]") {
    const auto file = paper_preset(1.0 / 25.0);
    const auto& s = file.scenario;
    const auto data = generate_dataset(s, file.attacks, 20000, 8);
    const DetectorConfig cfg{280.0, DetectMethod::analytic, 200000};
    const auto rep = detect_all(s, cfg, data);
    CHECK(rep.decisions.size() == s.unsecure_indices().size());
    CHECK(std::is_sorted(rep.decisions.begin(), rep.decisions.end(),
                         [](const auto& x, const auto& y) { return x.id < y.id; }));
    CHECK(rep.secure_id1 == 21);
    CHECK(rep.secure_id2 == 22);
    for (const auto& d : rep.decisions) {
        CHECK(detect_sensor(s, cfg, data, d.id) == d.decision);
        CHECK(std::isfinite(d.d_hat));
    }
    const auto grid = detect_all(s, {280.0, DetectMethod::discretized, 200000}, data);
    int agree = 0;
    for (std::size_t k = 0; k < rep.decisions.size(); ++k) {
        agree += rep.decisions[k].decision == grid.decisions[k].decision ? 1 : 0;
    }
    CHECK(agree >= static_cast<int>(rep.decisions.size()) - 1);

    CHECK_THROWS_AS(detect_sensor(s, cfg, data, 21), DomainError);
    CHECK_THROWS_AS(rep.of(99), MissingSensorData);
    QuantizedDataset partial;
    partial.add(1, data.bits_of(1));
    CHECK_THROWS_AS(detect_all(s, cfg, partial), MissingSensorData);
    CHECK_THROWS_AS(detect_all(s, {0.0, DetectMethod::analytic, 10}, data), DomainError);
    CHECK_THROWS_AS(detect_all(s, {1.0, DetectMethod::discretized, 2}, data), DomainError);
    CHECK(detect_method_from_string("discretized") == DetectMethod::discretized);
    CHECK_THROWS_AS(detect_method_from_string("grid"), DomainError);
}
