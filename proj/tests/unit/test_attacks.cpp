#include <catch_amalgamated.hpp>

#include <random>

#include <geoguard.hpp>

#include "support/oracles.hpp"

using namespace geoguard;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ScenarioConfig reference_scenario() {
    ScenarioConfig s;
    s.roi = {{0, 1e5}, 7500};
    s.target = {0, 1e5};
    s.sensors = {{1, {0, 0}, 1.0, NoiseModel::standard_gaussian(), false},
                 {2, {-1000, 0}, 1.0, NoiseModel::standard_gaussian(), true},
                 {3, {1000, 0}, 1.0, NoiseModel::standard_gaussian(), true}};
    s.p0 = 1.0;
    s.d0 = 1e5;
    s.gamma = 2.0;
    return s;
}

double zero_fraction(const std::vector<std::uint8_t>& bits) { return empirical_freq(bits).xi; }

}  // namespace

TEST_CASE("bit-flip channel", "[attacks]") {
    const std::vector<std::uint8_t> bits{0, 1, 0, 1, 1, 0, 0};
    CHECK(apply_attack(Mima{0.0, 0.0}, bits, 5) == bits);
    CHECK(apply_attack(NoAttack{}, bits, 5) == bits);
    const std::vector<std::uint8_t> three{0, 1, 0};
    CHECK(apply_attack(Mima{1.0, 1.0}, three, 5) == std::vector<std::uint8_t>{1, 0, 1});

    const std::vector<std::uint8_t> ones(1000000, 1);
    const auto flipped = apply_attack(Mima{0.0, 0.0105}, ones, 11, 3);
    CHECK_THAT(zero_fraction(flipped), WithinAbs(0.0105, 3e-4));
    const std::vector<std::uint8_t> zeros(1000000, 0);
    CHECK_THAT(1.0 - zero_fraction(apply_attack(Mima{0.02, 0.0}, zeros, 11, 3)), WithinAbs(0.02, 4.2e-4));

    CHECK(apply_attack(Mima{0.3, 0.2}, bits, 5, 1) == apply_attack(Mima{0.3, 0.2}, bits, 5, 1));
    CHECK_THROWS_AS(apply_attack(SpoofBias{0.1}, bits, 5), VariantMismatch);
    CHECK_THROWS_AS(apply_attack(PsiOffset{0.1}, bits, 5), VariantMismatch);
    CHECK_THROWS_AS(apply_attack(Mima{1.5, 0.0}, bits, 5), DomainError);
}

TEST_CASE("spoofing bias", "[attacks]") {
    const std::vector<double> x{1.0, -2.5, 3.0};
    CHECK(apply_spoof(SpoofBias{0.0}, x) == x);
    const std::vector<double> one{1.0};
    CHECK_THAT(apply_spoof(SpoofBias{0.2}, one)[0], WithinAbs(1.2, 1e-15));
    CHECK_THROWS_AS(apply_spoof(Mima{}, x), VariantMismatch);

    // biased samples, quantized, against the shifted-threshold probability
    auto s = reference_scenario();
    const AttackSpec spoof = SpoofBias{0.3};
    const double tp = post_attack_prob(s, 0, spoof);
    CHECK_THAT(tp, WithinRel(oracle::normal_cdf(1.0 - 0.3 - 1.0), 1e-12));
    const auto samples = apply_spoof(spoof, sample_signal(s, 0, 1000000, 23));
    const double xi = zero_fraction(quantize(s, 0, samples));
    CHECK(std::abs(xi - tp) <= 3.0 * std::sqrt(tp * (1 - tp) / 1e6));
}

TEST_CASE("post-attack probability", "[attacks]") {
    CHECK_THAT(post_attack_prob(Mima{0.0, 0.0105}, 0.5), WithinAbs(0.50525, 1e-15));
    CHECK(post_attack_prob(NoAttack{}, 0.37) == 0.37);
    CHECK(post_attack_prob(Mima{0.0, 1.0}, 0.2) == 1.0);
    CHECK(post_attack_prob(Mima{1.0, 0.0}, 0.7) == 0.0);
    CHECK_THAT(post_attack_prob(PsiOffset{-0.1}, 0.4), WithinAbs(0.3, 1e-15));
    CHECK_THROWS_AS(post_attack_prob(PsiOffset{0.3}, 0.8), DomainError);
    CHECK_THROWS_AS(post_attack_prob(SpoofBias{0.1}, 0.5), VariantMismatch);
    CHECK_THROWS_AS(post_attack_prob(NoAttack{}, 1.5), DomainError);

    CHECK_THAT(psi_of(Mima{0.0, 0.0105}, 0.5), WithinAbs(0.00525, 1e-15));
    CHECK(psi_of(NoAttack{}, 0.3) == 0.0);
    CHECK_THAT(psi_of(Mima{0.07, 0.07}, 0.5), WithinAbs(0.0, 1e-16));

    const auto noise = NoiseModel::logistic(0.1, 0.7);
    CHECK_THAT(post_attack_prob(SpoofBias{0.0}, 0.42, noise), WithinAbs(0.42, 1e-12));
    CHECK(post_attack_prob(SpoofBias{0.5}, 0.42, noise) < 0.42);
    CHECK(post_attack_prob(SpoofBias{-0.5}, 0.42, noise) > 0.42);
}

TEST_CASE("channel law matches exhaustive enumeration", "[attacks]") {
    // Enumerate every input bit and flip outcome for K bits and compare the
    // distribution of the zero count with Binomial(K, p~).
    const auto check = [](double p, double psi0, double psi1, int k) {
        std::vector<double> pmf(static_cast<std::size_t>(k) + 1, 0.0);
        const std::uint64_t cases = std::uint64_t{1} << (2 * k);
        for (std::uint64_t c = 0; c < cases; ++c) {
            double prob = 1.0;
            int zeros = 0;
            for (int i = 0; i < k; ++i) {
                const bool in_zero = (c >> (2 * i)) & 1u;
                const bool flip = (c >> (2 * i + 1)) & 1u;
                const double f = in_zero ? psi0 : psi1;
                prob *= (in_zero ? p : 1.0 - p) * (flip ? f : 1.0 - f);
                zeros += (in_zero != flip) ? 1 : 0;
            }
            pmf[static_cast<std::size_t>(zeros)] += prob;
        }
        const double tp = post_attack_prob(Mima{psi0, psi1}, p);
        for (int i = 0; i <= k; ++i) {
            const double expected = std::exp(oracle::log_binom_term(k, i, tp));
            REQUIRE_THAT(pmf[static_cast<std::size_t>(i)], WithinAbs(expected, 1e-13));
        }
    };
    check(0.5, 0.0, 0.0105, 6);
    check(0.3, 0.2, 0.1, 7);
    check(0.8, 0.05, 0.4, 5);
    check(0.1, 0.3, 0.0, 6);
}

TEST_CASE("generated data follows the attacked law", "[attacks]") {
    auto s = reference_scenario();
    AttackAssignment attacks;
    attacks.set(1, Mima{0.01, 0.2});
    const auto data = generate_dataset(s, attacks, 200000, 99);

    // the fast path is the bit-domain channel applied to the clean bits
    CHECK(data.bits_of(1) == apply_attack(Mima{0.01, 0.2}, sample_bits(s, 0, 200000, 99), 99, 1));
    CHECK(data.bits_of(2) == sample_bits(s, 1, 200000, 99));

    const double tp = post_attack_prob(s, 0, Mima{0.01, 0.2});
    CHECK(std::abs(zero_fraction(data.bits_of(1)) - tp) <= 3.0 * std::sqrt(tp * (1 - tp) / 2e5));

    const auto counts = zero_counts(s, attacks, 200000, 99);
    for (std::size_t j = 0; j < s.sensors.size(); ++j) {
        const auto& bits = data.bits_of(s.sensors[j].id);
        CHECK(counts[j] == static_cast<std::uint64_t>(std::count(bits.begin(), bits.end(), 0)));
    }

    AttackAssignment offset;
    offset.set(1, PsiOffset{-0.02});
    const double p = prob_zero(s, 0);
    const double xi = static_cast<double>(zero_counts(s, offset, 1000000, 3)[0]) / 1e6;
    CHECK(std::abs(xi - (p - 0.02)) <= 3.0 * std::sqrt(p * (1 - p) / 1e6));
}

TEST_CASE("subtlety and significance", "[attacks]") {
    auto s = reference_scenario();
    const RhoBounds rho = rho_bounds(s, 0);
    CHECK(check_subtle(s, 0, Mima{0.0, 0.0105}));
    CHECK(check_subtle(s, 0, NoAttack{}));
    CHECK_FALSE(check_subtle(s, 0, PsiOffset{rho.upper - prob_zero(s, 0) + 0.01}));

    CHECK(check_significant(Mima{0.0, 0.0105}, 0.5, 0.005));
    CHECK_FALSE(check_significant(Mima{0.0, 0.0105}, 0.5, 0.006));
    CHECK_FALSE(check_significant(NoAttack{}, 0.5, 0.005));
    CHECK_THROWS_AS(check_significant(NoAttack{}, 0.5, 0.0), DomainError);
    CHECK(check_significant(s, 0, Mima{0.0, 0.0105}, 0.005));
}

TEST_CASE("attack assignment", "[attacks]") {
    auto s = reference_scenario();
    AttackAssignment a;
    CHECK_FALSE(a.attacked(1));
    a.set(1, Mima{0.0, 0.01});
    CHECK(a.attacked(1));
    CHECK_NOTHROW(a.validate_against(s));
    a.set(2, PsiOffset{0.01});
    CHECK_THROWS_AS(a.validate_against(s), InvalidScenario);
    AttackAssignment unknown;
    unknown.set(42, NoAttack{});
    CHECK_THROWS_AS(unknown.validate_against(s), MissingSensorData);
    CHECK(describe(NoAttack{}) == "none");
}
