#include "lmo/bernoulli_exact.hpp"
#include "lmo/oracle.hpp"

#include <gtest/gtest.h>

using namespace lmo;

namespace {

JointTable table(int n, int m, int k, double p, Algorithm alg = Algorithm::AverageErm, Loss loss = Loss::Quadratic)
{
    return JointTable(TinyInstance{PartitionConfig(n, m, k), p, alg, loss});
}

} // namespace

// Reference values: independent enumeration in tests/oracle_values.py.

TEST(JointTable, WeightsSumToOne)
{
    for (double p : {0.0, 0.3, 1.0}) EXPECT_NEAR(table(3, 3, 3, p).total_weight(), 1.0, 1e-14);
}

TEST(JointTable, SizeLimits)
{
    EXPECT_THROW(table(10, 5, 5, 0.5), std::invalid_argument);
    EXPECT_NO_THROW(table(4, 4, 2, 0.5));
}

TEST(InfoQuery, MatchesIndependentEnumeration)
{
    EXPECT_NEAR(info_query(table(2, 1, 1, 0.3), {Var::w()}, {Var::u_all()}, {Var::z_all()}).value, 0.40100392602573207562, 1e-12);
    EXPECT_NEAR(info_query(table(3, 3, 3, 0.5), {Var::w()}, {Var::u(0)}, {Var::z_block(0)}).value, 0.10788077716941784779, 1e-12);
    EXPECT_NEAR(info_query(table(2, 1, 1, 0.5), {Var::w()}, {Var::z_train_all()}).value, 1.0397207708399179641, 1e-12);
    EXPECT_NEAR(info_query(table(3, 1, 1, 0.4), {Var::w()}, {Var::z_train_at(0, 0)}).value, 0.21472146583699120671, 1e-12);
    EXPECT_NEAR(info_query(table(2, 4, 2, 0.3), {Var::w()}, {Var::u(0)}, {Var::z_block(0)}).value, 0.2192009229180109363, 1e-12);
    EXPECT_NEAR(info_query(table(4, 2, 2, 0.3), {Var::w()}, {Var::u(0)}, {Var::z_block(0)}).value, 0.1535892089592714085, 1e-12);
    EXPECT_NEAR(info_query(table(3, 2, 1, 0.6), {Var::w()}, {Var::u_all()}, {Var::z_all()}).value, 0.74334865763261531354, 1e-12);
    EXPECT_NEAR(info_query(table(2, 2, 1, 0.4), {Var::w()}, {Var::u(0)}, {Var::z(0)}).value, 0.10532863454603796499, 1e-12);
    const auto t = table(2, 3, 1, 0.4);
    EXPECT_NEAR(info_query(t, {Var::w()}, {Var::u(0)}, {Var::z(0)}, std::vector<std::int64_t>{1}).value, 0.13985460012513731155, 1e-12);
    EXPECT_NEAR(info_query(t, {Var::w()}, {Var::u(0)}, {Var::z(0)}, std::vector<std::int64_t>{0}).value, 0.065581484127205319953, 1e-12);
}

TEST(InfoQuery, AgreesWithClosedForms)
{
    for (double p : {0.2, 0.5, 0.65}) {
        const auto t = table(3, 3, 1, p);
        EXPECT_NEAR(info_query(t, {Var::w()}, {Var::u(0)}, {Var::z(0)}).value, info_quantity(InfoKind::LMO_SCMI, {3, 3, 0, p}).value, 1e-10);
        EXPECT_NEAR(info_query(t, {Var::w()}, {Var::u_all()}, {Var::z_all()}).value, info_quantity(InfoKind::LMO_CMI, {3, 3, 1, p}).value, 1e-10);
        EXPECT_NEAR(info_query(table(4, 1, 1, p), {Var::w()}, {Var::z_train_all()}).value, info_quantity(InfoKind::MI_FULL, {4, 0, 0, p}).value, 1e-10);
    }
}

TEST(InfoQuery, SymmetricAndNonNegative)
{
    const auto t = table(2, 2, 2, 0.35, Algorithm::MajorityVote, Loss::ZeroOne);
    const double ab = info_query(t, {Var::w()}, {Var::z_block(1)}).value;
    const double ba = info_query(t, {Var::z_block(1)}, {Var::w()}).value;
    EXPECT_NEAR(ab, ba, 1e-14);
    EXPECT_GE(info_query(t, {Var::loss(0, 1)}, {Var::t(0, 1)}, {Var::z(1)}).value, 0.0);
    EXPECT_NEAR(info_query(t, {Var::z(0)}, {Var::z(1)}).value, 0.0, 1e-14);
}

TEST(InfoQuery, ChainRule)
{
    for (auto [n, m] : std::vector<std::pair<int, int>>{{2, 2}, {3, 1}, {3, 3}, {4, 2}}) {
        const auto t = table(n, m, 1, 0.3);
        const double lhs = info_query(t, {Var::w()}, {Var::u(0)}, {Var::z_block(0)}).value;
        const double rhs = info_query(t, {Var::w()}, {Var::z_train(0)}).value - info_query(t, {Var::w()}, {Var::z_block(0)}).value;
        EXPECT_NEAR(lhs, rhs, 1e-10);
    }
}

TEST(InfoQuery, DisintegratedAveragesToConditional)
{
    const double p = 0.3;
    const auto t = table(3, 1, 1, p);
    const double avg = (1 - p) * info_query(t, {Var::w()}, {Var::u(0)}, {Var::z(2)}, std::vector<std::int64_t>{0}).value +
                       p * info_query(t, {Var::w()}, {Var::u(0)}, {Var::z(2)}, std::vector<std::int64_t>{1}).value;
    EXPECT_NEAR(avg, info_query(t, {Var::w()}, {Var::u(0)}, {Var::z(2)}).value, 1e-12);
}

TEST(InfoQuery, Errors)
{
    const auto t = table(2, 2, 2, 0.5);
    EXPECT_THROW(info_query(t, {}, {Var::w()}), std::invalid_argument);
    EXPECT_THROW(info_query(t, {Var::w()}, {Var::u(2)}), std::invalid_argument);
    EXPECT_THROW(info_query(t, {Var::w()}, {Var::z(4)}), std::invalid_argument);
    EXPECT_THROW(info_query(t, {Var::w()}, {Var::u(0)}, {Var::z(0)}, std::vector<std::int64_t>{0, 1}), std::invalid_argument);
    const auto degenerate = table(2, 2, 2, 0.0);
    EXPECT_THROW(info_query(degenerate, {Var::w()}, {Var::u(0)}, {Var::z(0)}, std::vector<std::int64_t>{1}), std::invalid_argument);
}

TEST(ExactRisks, CvErrorUnbiased)
{
    for (auto [n, m, k] : std::vector<std::tuple<int, int, int>>{{1, 1, 1}, {2, 4, 2}, {4, 2, 2}, {3, 3, 3}})
        for (double p : {0.25, 0.5})
            EXPECT_NEAR(expected_cv_error(table(n, m, k, p)), true_gen_error(n, p), 1e-12);
}

TEST(ExactRisks, LossDelta)
{
    EXPECT_NEAR(loss_delta(table(2, 2, 1, 0.5)), 1.0, 1e-15);
    EXPECT_NEAR(loss_delta(table(2, 2, 1, 0.5, Algorithm::MajorityVote, Loss::ZeroOne)), 1.0, 1e-15);
}

TEST(ExactCgf, ZeroAtOriginConvexNonNegative)
{
    const auto t = table(4, 2, 2, 0.4);
    EXPECT_NEAR(exact_cgf(t, 0, 0.0).worst, 0.0, 1e-14);
    double prev = 0.0;
    for (double lam = 0.1; lam <= 2.0; lam += 0.1) {
        const auto c = exact_cgf(t, 1, lam);
        EXPECT_GE(c.mean, -1e-12);
        EXPECT_GE(c.worst + 1e-12, c.mean);
        EXPECT_GE(c.mean + 1e-12, prev);
        prev = c.mean;
    }
    EXPECT_THROW(exact_cgf(t, 2, 0.5), std::invalid_argument);
}

TEST(ZeroOneEquality, HoldsOnMajorityVote)
{
    for (auto [n, m, k] : std::vector<std::tuple<int, int, int>>{{3, 1, 1}, {2, 2, 2}, {2, 2, 1}, {4, 2, 2}})
        for (double p : {0.3, 0.5}) {
            const auto rep = zero_one_equality_check(TinyInstance{PartitionConfig(n, m, k), p, Algorithm::MajorityVote, Loss::ZeroOne});
            EXPECT_TRUE(rep.ok()) << (rep.failures.empty() ? "" : rep.failures.front());
            EXPECT_NEAR(rep.djs, rep.rhs, 1e-9);
        }
    EXPECT_THROW(zero_one_equality_check(TinyInstance{PartitionConfig(2, 2, 2), 0.5}), std::invalid_argument);
}

TEST(ZeroOneEquality, PopulationRiskRecoveredBySingleInversion)
{
    const TinyInstance ti{PartitionConfig(3, 1, 1), 0.3, Algorithm::MajorityVote, Loss::ZeroOne};
    const auto rep = zero_one_equality_check(ti);
    ASSERT_LE(rep.emp_risk, rep.pop_risk);
    EXPECT_NEAR(d_js_inverse(0.75, rep.emp_risk, rep.rhs, 1e-14), rep.pop_risk, 1e-9);
}

TEST(DualRepresentation, LooAndStandardAgree)
{
    for (int n : {1, 2, 3})
        for (double p : {0.2, 0.5}) {
            const auto d = dual_representation_check(n, p);
            if (d.applicable) {
                EXPECT_NEAR(d.loo_form, d.std_form, 1e-9) << "n=" << n << " p=" << p;
            }
        }
}
