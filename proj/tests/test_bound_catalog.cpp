#include "lmo/bound_catalog.hpp"

#include <gtest/gtest.h>

using namespace lmo;

TEST(CoefficientC, Examples)
{
    EXPECT_NEAR(coefficient_C(PartitionConfig(5, 1, 1)), 1.2, 1e-15);
    EXPECT_NEAR(coefficient_C(PartitionConfig(6, 4, 2)), 1.875, 1e-15);
    EXPECT_NEAR(coefficient_C(PartitionConfig(8, 8, 4)), 8.0 / 3.0, 1e-15);
    for (int n : {2, 4, 6})
        for (int m : {2, 4, 6})
            for (int k : divisor_set(n, m)) EXPECT_GE(coefficient_C(PartitionConfig(n, m, k)), 1.0);
}

TEST(Assemble, ZeroInformationGivesZero)
{
    for (BoundKind k : sqrt_sum_bound_kinds()) {
        BoundParams bp{4, 4, 2, 1.0};
        EXPECT_EQ(assemble(k, std::vector<double>(bound_term_count(k, bp), 0.0), bp).value, 0.0) << to_string(k);
    }
}

TEST(Assemble, CoefficientsAppliedPerTerm)
{
    const std::vector<double> info = {0.1, 0.2, 0.3};
    const auto v = assemble(BoundKind::ICIMI, info, {3, 3, 3});
    EXPECT_NEAR(v.value, (std::sqrt(2 * 0.1) + std::sqrt(2 * 0.2) + std::sqrt(2 * 0.3)) / 3.0, 1e-15);
    EXPECT_NEAR(v.info_total, 0.6, 1e-15);
    const auto lofo = assemble(BoundKind::LOFO_CMI, {0.05, 0.07}, {4, 2, 2});
    EXPECT_NEAR(lofo.value, 6.0 / 8.0 * (std::sqrt(0.05 / 2) + std::sqrt(0.07 / 2)), 1e-15);
    const auto loo = assemble(BoundKind::LOO_CMI, {0.4}, {5, 1, 1});
    EXPECT_NEAR(loo.value, 6.0 / 5.0 * std::sqrt(0.2), 1e-15);
    const auto lmo_scmi = assemble(BoundKind::LMO_SCMI, std::vector<double>(5, 0.02), {3, 2, 1});
    EXPECT_NEAR(lmo_scmi.value, 5 * std::sqrt(0.02 / 12.0), 1e-15);
}

TEST(Assemble, ShapeAndDeltaErrors)
{
    EXPECT_THROW(assemble(BoundKind::ICIMI, {0.1, 0.2}, {3, 3, 3}), std::invalid_argument);
    EXPECT_THROW(assemble(BoundKind::LMO_CMI, {0.1}, {3, 2, 1}), std::invalid_argument);
    EXPECT_THROW(assemble(BoundKind::IPCIMI_BOUNDED, {0.1, 0.1}, {4, 4, 2}), std::invalid_argument);
    EXPECT_THROW(assemble(BoundKind::IMI, {0.1, -0.1, 0.1}, {3}), std::invalid_argument);
    EXPECT_THROW(assemble(BoundKind::GENERAL_CGF, {0.1}, {3}), std::invalid_argument);
    try {
        assemble(BoundKind::LMO_CMI, {0.1}, {3, 2, 1});
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("missing Delta"), std::string::npos);
    }
}

TEST(Assemble, VariantBeatsBoundedAtHalfBlocks)
{
    for (int n : {4, 8, 12}) {
        BoundParams bp{n, n, n / 2, 1.0};
        const std::vector<double> q(n / 2, 0.13);
        EXPECT_LE(assemble(BoundKind::VAR_IPCIMI, q, bp).value, assemble(BoundKind::IPCIMI_BOUNDED, q, bp).value);
    }
}

TEST(Assemble, LmoCmiReducesToMiCoefficientAsMGrows)
{
    const double a = bound_coefficient(BoundKind::LMO_CMI, {10, 100000, 1, 1.0});
    EXPECT_NEAR(a, bound_coefficient(BoundKind::MI, {10}), 1e-5);
}

TEST(LambdaOptimize, QuadraticCgf)
{
    for (double s2 : {0.25, 1.0, 4.0})
        for (double info : {1e-3, 0.1, 2.0}) {
            const auto r = lambda_optimize(info, [&](double l) { return l * l * s2 / 2; });
            EXPECT_NEAR(r.value / std::sqrt(2 * s2 * info), 1.0, 1e-6);
        }
}

TEST(LambdaOptimize, HoeffdingRecoversBoundedCoefficient)
{
    const auto r = lambda_optimize(0.3, [](double l) { return l * l / 8; });
    EXPECT_NEAR(r.value, std::sqrt(0.3 / 2), 1e-8);
}

TEST(LambdaOptimize, NonFiniteRegionsSkipped)
{
    // Finite only for lambda < 1.
    auto psi = [](double l) { return l < 1.0 ? -std::log1p(-l) - l : kInf; };
    const auto r = lambda_optimize(0.05, psi);
    EXPECT_LT(r.lambda, 1.0);
    EXPECT_TRUE(std::isfinite(r.value));
    EXPECT_THROW(lambda_optimize(0.1, [](double) { return kInf; }), std::domain_error);
}

TEST(LambdaOptimize, NotAboveAnyGridPoint)
{
    auto psi = [](double l) { return 0.3 * l * l + 0.1 * l * l * l; };
    const auto r = lambda_optimize(0.2, psi);
    for (double l = 1e-3; l < 100; l *= 1.1) EXPECT_LE(r.value, (0.2 + psi(l)) / l + 1e-12);
}

TEST(JsBound, ZeroInfoReturnsEmpiricalRisk)
{
    const PartitionConfig c(4, 2, 2);
    EXPECT_NEAR(js_population_bound(0.2, 0.0, c, JsMode::Blockwise), 0.2, 1e-10);
    EXPECT_EQ(js_population_bound(0.2, 100.0, c, JsMode::Single), 1.0);
}

TEST(JsBound, MonotoneInBudgetAndRisk)
{
    const PartitionConfig c(6, 4, 2);
    double prev = 0.0;
    for (double s = 0.0; s < 2.0; s += 0.1) {
        const double v = js_population_bound(0.1, s, c, JsMode::Single);
        EXPECT_GE(v, prev);
        prev = v;
    }
    prev = 0.0;
    for (double e = 0.0; e <= 1.0; e += 0.05) {
        const double v = js_population_bound(e, 0.3, c, JsMode::Blockwise);
        EXPECT_GE(v, prev - 1e-12);
        prev = v;
    }
    EXPECT_NEAR(js_budget(1.0, c, JsMode::Blockwise), 2 * js_budget(1.0, c, JsMode::Single), 1e-15);
}

TEST(BoundKindNames, RoundTrip)
{
    for (int i = 0; i <= static_cast<int>(BoundKind::JS_PRED_SINGLE); ++i) {
        const auto k = static_cast<BoundKind>(i);
        EXPECT_EQ(parse_bound_kind(to_string(k)), k);
    }
    EXPECT_FALSE(parse_bound_kind("NOPE").has_value());
}

TEST(AssembleDisintegrated, WeightsInsideSquareRoot)
{
    const BoundParams bp{2, 3, 1};
    const auto v = assemble_disintegrated(BoundKind::LMO_SCMI, {0.06, 0.14}, {0.6, 0.4}, bp);
    EXPECT_NEAR(v.value, 5 * (0.6 * std::sqrt(0.06 / 12) + 0.4 * std::sqrt(0.14 / 12)), 1e-15);
    EXPECT_THROW(assemble_disintegrated(BoundKind::LMO_SCMI, {0.1}, {0.5, 0.5}, bp), std::invalid_argument);
}
