#include <catch_amalgamated.hpp>

#include <random>

#include <geoguard.hpp>

#include "support/oracles.hpp"
#include "support/random_scenarios.hpp"

using namespace geoguard;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("rate functions equal Bernoulli divergences", "[analysis]") {
    double worst = 0.0;
    for (int i = 1; i <= 100; ++i) {
        const double p = i / 101.0;
        for (int k = 0; k < 100; ++k) {
            const double t = k / 100.0;
            const double up = rate_eta1(p, t);
            if (p + t > 1.0) {
                REQUIRE(std::isinf(up));
            } else {
                worst = std::max(worst, std::abs(up - oracle::kl_bernoulli(std::min(1.0, p + t), p)));
            }
            const double down = rate_eta2(p, t);
            if (t > p) {
                REQUIRE(std::isinf(down));
            } else {
                worst = std::max(worst, std::abs(down - oracle::kl_bernoulli(std::max(0.0, p - t), p)));
            }
            const double el = p * (k + 0.5) / 100.5;
            const double eu = p + (1.0 - p) * (k + 0.5) / 100.5;
            const EpsRates e = rate_eps(p, el, eu);
            worst = std::max(worst, std::abs(e.lower - oracle::kl_bernoulli(el, p)));
            worst = std::max(worst, std::abs(e.upper - oracle::kl_bernoulli(eu, p)));
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("rate function examples and shape", "[analysis]") {
    CHECK(rate_eta1(0.5, 0.0) == 0.0);
    CHECK(rate_eta2(0.5, 0.0) == 0.0);
    CHECK_THAT(rate_eta1(0.5, 0.5), WithinAbs(std::log(2.0), 1e-15));
    CHECK_THAT(rate_eta2(0.5, 0.5), WithinAbs(std::log(2.0), 1e-15));
    CHECK_THAT(rate_eta1(0.5, 0.1), WithinAbs(0.6 * std::log(1.2) + 0.4 * std::log(0.8), 1e-15));
    CHECK(std::isinf(rate_eta1(0.7, 0.31)));
    CHECK(std::isinf(rate_eta2(0.2, 0.21)));
    CHECK_THROWS_AS(rate_eta1(0.0, 0.1), DomainError);
    CHECK_THROWS_AS(rate_eta2(0.5, -0.1), DomainError);
    CHECK_THROWS_AS(rate_eps(0.5, 0.6, 0.9), DomainError);

    // increasing and convex in t
    for (const double p : {0.05, 0.3, 0.5, 0.9}) {
        double prev1 = 0.0, prev2 = 0.0, slope1 = 0.0;
        const double h = std::min(p, 1.0 - p) / 50.0;
        for (int i = 1; i < 50; ++i) {
            const double e1 = rate_eta1(p, i * h);
            const double e2 = rate_eta2(p, i * h);
            REQUIRE(e1 > prev1);
            REQUIRE(e2 > prev2);
            REQUIRE(e1 - prev1 >= slope1 - 1e-15);
            slope1 = e1 - prev1;
            prev1 = e1;
            prev2 = e2;
        }
    }

    CHECK(decay(infinite_rate, 0.0) == 1.0);
    CHECK(decay(infinite_rate, 5.0) == 0.0);
    CHECK_THAT(decay(0.01, 100.0), WithinRel(std::exp(-1.0), 1e-15));
}

TEST_CASE("Chernoff bounds dominate exact binomial tails", "[analysis]") {
    for (const double p : {0.2, 0.5, 0.8}) {
        for (const double t : {0.05, 0.1}) {
            for (const std::int64_t k : {50, 200, 1000}) {
                const auto m_up = static_cast<std::int64_t>(std::ceil((p + t) * k - 1e-9));
                const auto m_dn = static_cast<std::int64_t>(std::floor((p - t) * k + 1e-9));
                const double up = oracle::binomial_upper_tail(k, p, m_up);
                const double dn = oracle::binomial_lower_tail(k, p, m_dn);
                CHECK(up <= std::exp(-rate_eta1(p, t) * k));
                CHECK(dn <= std::exp(-rate_eta2(p, t) * k));
                CHECK(up > 0.0);
            }
        }
    }
}

TEST_CASE("epsilon bracket and Lipschitz factor", "[analysis]") {
    std::mt19937_64 rng(404);
    for (int i = 0; i < 200; ++i) {
        const auto s = testing_support::random_scenario(rng, {3, true, true});
        for (std::size_t j = 0; j < s.sensors.size(); ++j) {
            const RhoBounds rho = rho_bounds(s, j);
            const EpsilonBounds e = epsilon_bounds(s, j, {0.3, 0.6});
            const double top = s.sensors[j].noise.cdf(s.sensors[j].threshold);
            REQUIRE(0.0 < e.lower);
            REQUIRE(e.lower < rho.lower);
            REQUIRE(rho.upper < e.upper);
            REQUIRE(e.upper < top);

            // Xi bounds the slope of the distance map on the whole bracket
            const double xi = xi_factor(s, j, e);
            for (int k = 0; k < 20; ++k) {
                const double a = e.lower + (e.upper - e.lower) * k / 20.0;
                const double b = e.lower + (e.upper - e.lower) * (k + 1) / 20.0;
                const double slope = std::abs(attacked_distance(s, j, b) - attacked_distance(s, j, a)) / (b - a);
                REQUIRE(slope <= xi * (1 + 1e-9));
            }
        }
    }
    const auto s = paper_preset(1.0 / 25.0).scenario;
    CHECK_THROWS_AS(epsilon_bounds(s, 0, {0.0, 0.5}), DomainError);
    CHECK_THROWS_AS(epsilon_bounds(s, 0, {0.5, 1.0}), DomainError);
    CHECK_THROWS_AS(xi_factor(s, 0, EpsilonBounds{0.4, 0.3}), DomainError);
}

TEST_CASE("composite exponents", "[analysis]") {
    const auto file = paper_preset(1.0 / 25.0);
    const auto r = composite_exponents(file.scenario, file.attacks, {280.0});
    CHECK(r.composite.size() == 20);
    CHECK(r.sensors.size() == 22);
    CHECK(r.sensors[r.secure1].secure);
    double eta_e = infinite_rate;
    for (const auto& c : r.composite) {
        const auto& sr = r.sensors[file.scenario.index_of(c.id)];
        CHECK(c.attacked == file.attacks.attacked(c.id));
        CHECK(c.eta0 > 0.0);
        CHECK(c.eta0 <= sr.clean.min());
        CHECK(c.eta1 <= sr.tilde.min());
        CHECK(c.eta0 <= r.sensors[r.secure1].clean.min());
        if (!c.attacked) CHECK(c.eta0 == c.eta1);
        eta_e = std::min({eta_e, c.eta0, c.eta1});
    }
    CHECK(r.eta_e == eta_e);
    CHECK_THAT(r.sensors[0].t, WithinRel(280.0 / (2.0 * r.sensors[0].xi), 1e-15));

    for (const double k : {1e3, 1e5, 1e7, 1e9}) {
        for (std::size_t j = 0; j < 20; ++j) {
            const int id = file.scenario.sensors[j].id;
            REQUIRE(r.fa_raw(j, k) <= r.fa_bound(id, k) * (1 + 1e-12));
            REQUIRE(r.miss_raw(j, k) <= r.miss_bound(id, k) * (1 + 1e-12));
        }
        CHECK(r.pe_bound(k) >= r.fa_bound(1, k) - 1e-300);
    }
    CHECK(r.pe_bound(0.0) == 12.0);

    // exponents grow with delta
    const auto wider = composite_exponents(file.scenario, file.attacks, {300.0});
    CHECK(wider.eta_e >= r.eta_e);
    CHECK_THROWS_AS(r.of(99), MissingSensorData);

    // an attack pushed outside the epsilon bracket has no exponent
    AttackAssignment loud;
    loud.set(1, PsiOffset{0.3});
    CHECK_THROWS_AS(composite_exponents(file.scenario, loud, {280.0}), DomainError);
}
