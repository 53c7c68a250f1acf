#include "lmo/experiments.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace lmo;

namespace {

std::string csv(const std::vector<ResultRow>& rows)
{
    std::ostringstream os;
    write_csv(os, rows);
    return os.str();
}

} // namespace

TEST(FormatNumber, Shortest)
{
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(10), "10");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
}

TEST(WriteCsv, HeaderOnlyWhenEmpty)
{
    EXPECT_EQ(csv({}), "bound,n,m,k,param,value,stderr,provenance,seed\n");
}

TEST(EvaluatePoint, BernoulliLooMatchesFrozenInformation)
{
    const auto r = evaluate_point("LOO_CMI", Family::Bernoulli, 2, 7, 1, 0.3, 0, 1, McConfig{});
    EXPECT_NEAR(r.value, std::sqrt(9.0 / 8.0 * 0.40100392602573207562), 1e-12);
    EXPECT_EQ(r.m, 1);
    EXPECT_EQ(r.param, "p=0.3");
    EXPECT_EQ(r.provenance, "closed-form");
}

TEST(EvaluatePoint, TrueGen)
{
    EXPECT_NEAR(evaluate_point("TRUE_GEN", Family::Bernoulli, 10, 1, 1, 0.4, 0, 1, McConfig{}).value, 0.048, 1e-15);
    EXPECT_NEAR(evaluate_point("TRUE_GEN", Family::Gaussian, 10, 5, 1, 0, 0, 2, McConfig{}).value, 0.8, 1e-15);
}

TEST(EvaluatePoint, UnknownAndInvalid)
{
    EXPECT_THROW(evaluate_point("NOPE", Family::Bernoulli, 4, 2, 1, 0.3, 0, 1, McConfig{}), std::invalid_argument);
    EXPECT_THROW(evaluate_point("LOFO_CMI", Family::Bernoulli, 5, 2, 1, 0.3, 0, 1, McConfig{}), std::invalid_argument);
    EXPECT_THROW(evaluate_point("IMI_DIS", Family::Bernoulli, 5, 2, 1, 0.3, 0, 1, McConfig{}), std::invalid_argument);
    EXPECT_THROW(evaluate_point("IMI_GAUSS", Family::Gaussian, 5, 2, 1, 0, 0, 0, McConfig{}), std::invalid_argument);
}

TEST(EvaluatePoint, DisintegratedNotAboveIntegratedForm)
{
    // Jensen: E sqrt(I^z) <= sqrt(E I^z).
    for (int m : {1, 10, 100}) {
        const double dis = evaluate_point("LMO_SCMI_DIS", Family::Bernoulli, 10, m, 1, 0.25, 0, 1, McConfig{}).value;
        const double full = evaluate_point("LMO_SCMI", Family::Bernoulli, 10, m, 1, 0.25, 0, 1, McConfig{}).value;
        EXPECT_LE(dis, full + 1e-15);
    }
}

TEST(Preset, Grids)
{
    const auto f4 = preset("fig4");
    EXPECT_EQ(f4.n_grid, std::vector<int>{10});
    EXPECT_EQ(f4.p_grid, std::vector<double>{0.4});
    EXPECT_EQ(f4.m_grid.front(), 1);
    EXPECT_EQ(f4.m_grid.back(), 10000);
    const auto f5 = preset("fig5");
    EXPECT_EQ(f5.family, Family::Gaussian);
    EXPECT_TRUE(f5.m_half);
    EXPECT_EQ(preset("fig6").family, Family::GaussianFiniteW);
    EXPECT_EQ(preset("fig7").p_grid, std::vector<double>{0.25});
    EXPECT_THROW(preset("fig9"), std::invalid_argument);
}

TEST(RunSweep, DeterministicAcrossThreadCounts)
{
    SweepSpec s = preset("fig4");
    s.threads = 1;
    const auto a = run_sweep(s);
    s.threads = 4;
    const auto b = run_sweep(s);
    EXPECT_EQ(csv(a.rows), csv(b.rows));
    EXPECT_FALSE(a.rows.empty());
}

TEST(RunSweep, MonteCarloRowsReproducible)
{
    SweepSpec s = preset("fig5");
    s.n_grid = {4};
    s.mc.outer_samples = 100;
    s.seed = 7;
    s.threads = 2;
    EXPECT_EQ(csv(run_sweep(s).rows), csv(run_sweep(s).rows));
    const auto rows = run_sweep(s).rows;
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& r : rows) EXPECT_EQ(r.seed, 7u);
}

TEST(RunSweep, FixedMBoundsNotRepeatedAcrossMGrid)
{
    SweepSpec s;
    s.n_grid = {4};
    s.m_grid = {1, 2, 4};
    s.p_grid = {0.3};
    s.bounds = {"IMI", "LMO_CMI"};
    const auto res = run_sweep(s);
    int imi = 0, lmo = 0;
    for (const auto& r : res.rows) (r.bound == "IMI" ? imi : lmo)++;
    EXPECT_EQ(imi, 1);
    EXPECT_EQ(lmo, 3);
}

TEST(RunSweep, UnsatisfiablePointsSkippedWithReason)
{
    SweepSpec s;
    s.n_grid = {6};
    s.m_grid = {4};
    s.p_grid = {0.3};
    s.bounds = {"LOFO_CMI", "LOO_CMI"};
    const auto res = run_sweep(s);
    ASSERT_EQ(res.rows.size(), 1u);
    ASSERT_EQ(res.skipped.size(), 1u);
    EXPECT_NE(res.skipped[0].find("LOFO_CMI"), std::string::npos);
}

TEST(RunSweep, EmptyBoundListGivesHeaderOnly)
{
    SweepSpec s;
    s.n_grid = {4};
    s.p_grid = {0.3};
    const auto res = run_sweep(s);
    EXPECT_TRUE(res.rows.empty());
    EXPECT_EQ(csv(res.rows), "bound,n,m,k,param,value,stderr,provenance,seed\n");
}

TEST(PresetSweep, LmoNonIncreasingInM)
{
    SweepSpec s = preset("fig4");
    s.bounds = {"LMO_CMI"};
    const auto rows = run_sweep(s).rows;
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].value, rows[i - 1].value + 1e-15);
}

TEST(Verify, FastLevelPasses)
{
    const auto checks = run_verify(VerifyLevel::Fast, 1);
    EXPECT_FALSE(checks.empty());
    for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
    std::ostringstream os;
    print_report(os, checks);
    EXPECT_NE(os.str().find("PASS"), std::string::npos);
}
