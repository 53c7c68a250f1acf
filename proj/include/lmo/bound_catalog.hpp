#pragma once

#include "lmo/bernoulli_exact.hpp"
#include "lmo/info_measures.hpp"
#include "lmo/numeric.hpp"
#include "lmo/supersample.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmo {

enum class BoundKind {
    MI, IMI, IPMI, CMI_STD, ICIMI, LOO_CMI, IPCIMI_BOUNDED, LMO_CMI, LOFO_CMI, MN_IPCIMI,
    SIPCIMI, SICIMI, LOO_SCMI, LMO_SCMI, GENERAL_CGF, VAR_IPCIMI, JS_PRED, JS_PRED_SINGLE
};

inline std::string to_string(BoundKind k)
{
    switch (k) {
    case BoundKind::MI: return "MI";
    case BoundKind::IMI: return "IMI";
    case BoundKind::IPMI: return "IPMI";
    case BoundKind::CMI_STD: return "CMI_STD";
    case BoundKind::ICIMI: return "ICIMI";
    case BoundKind::LOO_CMI: return "LOO_CMI";
    case BoundKind::IPCIMI_BOUNDED: return "IPCIMI_BOUNDED";
    case BoundKind::LMO_CMI: return "LMO_CMI";
    case BoundKind::LOFO_CMI: return "LOFO_CMI";
    case BoundKind::MN_IPCIMI: return "MN_IPCIMI";
    case BoundKind::SIPCIMI: return "SIPCIMI";
    case BoundKind::SICIMI: return "SICIMI";
    case BoundKind::LOO_SCMI: return "LOO_SCMI";
    case BoundKind::LMO_SCMI: return "LMO_SCMI";
    case BoundKind::GENERAL_CGF: return "GENERAL_CGF";
    case BoundKind::VAR_IPCIMI: return "VAR_IPCIMI";
    case BoundKind::JS_PRED: return "JS_PRED";
    case BoundKind::JS_PRED_SINGLE: return "JS_PRED_SINGLE";
    }
    return "unknown";
}

inline const std::vector<BoundKind>& sqrt_sum_bound_kinds()
{
    static const std::vector<BoundKind> kinds = {
        BoundKind::MI, BoundKind::IMI, BoundKind::IPMI, BoundKind::CMI_STD, BoundKind::ICIMI, BoundKind::LOO_CMI,
        BoundKind::IPCIMI_BOUNDED, BoundKind::LMO_CMI, BoundKind::LOFO_CMI, BoundKind::MN_IPCIMI, BoundKind::SIPCIMI,
        BoundKind::SICIMI, BoundKind::LOO_SCMI, BoundKind::LMO_SCMI, BoundKind::VAR_IPCIMI};
    return kinds;
}

inline std::optional<BoundKind> parse_bound_kind(const std::string& s)
{
    for (int i = 0; i <= static_cast<int>(BoundKind::JS_PRED_SINGLE); ++i)
        if (to_string(static_cast<BoundKind>(i)) == s) return static_cast<BoundKind>(i);
    return std::nullopt;
}

struct BoundParams {
    int n = 1;
    int m = 0;
    int k = 0;
    std::optional<double> delta{};  // loss-difference range, required by the Delta-bearing kinds
};

struct BoundValue {
    BoundKind kind = BoundKind::MI;
    double value = 0.0;
    double coefficient = 0.0;  // value = sum_i sqrt(coefficient * I_i) for the square-root kinds
    double info_total = 0.0;
    double std_error = 0.0;
    int n = 0, m = 0, k = 0;
    double delta = 1.0;
    Provenance provenance = Provenance::ClosedForm;
};

inline double coefficient_C(const PartitionConfig& cfg)
{
    const double n = cfg.n(), m = cfg.m(), k = cfg.k();
    const double lo = std::min(n, m), hi = std::max(n, m);
    if (lo == k) return (n + m) / hi;
    const double den = n * m - k * lo;
    if (den <= 0.0) throw std::invalid_argument("coefficient_C: degenerate denominator nm - k min(n,m)");
    return (n + m) / (n + m - k) * (n * m / den);
}

namespace detail {

struct SqrtRule {
    int terms;
    double coefficient;
};

inline SqrtRule sqrt_rule(BoundKind kind, const BoundParams& bp)
{
    const double n = bp.n, m = bp.m, k = bp.k;
    auto need_m = [&] { if (bp.m < 1) throw std::invalid_argument(to_string(kind) + ": requires m >= 1"); };
    auto need_cfg = [&] { need_m(); return PartitionConfig(bp.n, bp.m, bp.k); };
    auto need_delta = [&] {
        if (!bp.delta) throw std::invalid_argument(to_string(kind) + ": missing Delta");
        if (!(*bp.delta > 0.0)) throw std::invalid_argument(to_string(kind) + ": Delta must be > 0");
        return *bp.delta;
    };
    switch (kind) {
    case BoundKind::MI: return {1, 1.0 / (2 * n)};
    case BoundKind::IMI: return {bp.n, 1.0 / (2 * n * n)};
    case BoundKind::IPMI:
        if (bp.k < 1 || bp.n % bp.k != 0) throw std::invalid_argument("IPMI: k must divide n");
        return {bp.k, 1.0 / (2 * n * k)};
    case BoundKind::CMI_STD: return {1, 2.0 / n};
    case BoundKind::ICIMI: case BoundKind::SICIMI: return {bp.n, 2.0 / (n * n)};
    case BoundKind::LOO_CMI: return {1, (n + 1) * (n + 1) / (2 * n * n)};
    case BoundKind::IPCIMI_BOUNDED: {
        const double d = need_delta();
        const double c = coefficient_C(need_cfg());
        return {bp.k, d * d * c * (n + m) / (2 * n * m * k)};
    }
    case BoundKind::LMO_CMI: {
        const double d = need_delta();
        need_m();
        const double c = coefficient_C(PartitionConfig(bp.n, bp.m, 1));
        return {1, d * d * c * (n + m) / (2 * n * m)};
    }
    case BoundKind::LOFO_CMI:
        need_m();
        if (bp.n % bp.m != 0) throw std::invalid_argument("LOFO_CMI: requires m | n");
        return {bp.m, (n + m) * (n + m) / (2 * n * n * m * m)};
    case BoundKind::MN_IPCIMI:
        need_m();
        if (bp.m % bp.n != 0) throw std::invalid_argument("MN_IPCIMI: requires n | m");
        return {bp.n, (n + m) * (n + m) / (2 * n * n * m * m)};
    case BoundKind::SIPCIMI: case BoundKind::LMO_SCMI:
        need_m();
        return {bp.n + bp.m, 1.0 / (2 * n * m)};
    case BoundKind::LOO_SCMI: return {bp.n + 1, 1.0 / (2 * n)};
    case BoundKind::VAR_IPCIMI:
        need_cfg();
        return {bp.k, (n + m) / (n * m * k)};
    default:
        throw std::invalid_argument(to_string(kind) + ": not a square-root-sum bound; use lambda_optimize or js_population_bound");
    }
}

inline void check_terms(BoundKind kind, const std::vector<double>& terms, int expected)
{
    if (static_cast<int>(terms.size()) != expected)
        throw std::invalid_argument(to_string(kind) + ": expected " + std::to_string(expected) + " per-term quantities, got " +
                                    std::to_string(terms.size()));
    for (double v : terms)
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument(to_string(kind) + ": per-term quantity must be finite and >= 0");
}

} // namespace detail

// Number of per-term quantities a square-root kind sums over.
inline int bound_term_count(BoundKind kind, const BoundParams& bp) { return detail::sqrt_rule(kind, bp).terms; }

inline double bound_coefficient(BoundKind kind, const BoundParams& bp) { return detail::sqrt_rule(kind, bp).coefficient; }

inline BoundValue assemble(BoundKind kind, const std::vector<double>& per_term, const BoundParams& bp)
{
    if (bp.n < 1) throw std::invalid_argument(to_string(kind) + ": n must be >= 1");
    const auto rule = detail::sqrt_rule(kind, bp);
    detail::check_terms(kind, per_term, rule.terms);
    BoundValue out;
    out.kind = kind;
    out.coefficient = rule.coefficient;
    for (double v : per_term) {
        out.value += std::sqrt(rule.coefficient * v);
        out.info_total += v;
    }
    out.n = bp.n; out.m = bp.m; out.k = bp.k;
    out.delta = bp.delta.value_or(1.0);
    return out;
}

inline BoundValue assemble(BoundKind kind, const InfoQuantity& q, const BoundParams& bp)
{
    BoundValue out = assemble(kind, q.per_term.empty() ? std::vector<double>{q.value} : q.per_term, bp);
    out.provenance = q.provenance;
    return out;
}

// Disintegrated form: the square-root rule applied inside the expectation over a
// finite conditioning variable, sum_i E_z sqrt(coefficient * I_i^z).
inline BoundValue assemble_disintegrated(BoundKind kind, const std::vector<double>& dis_values,
                                         const std::vector<double>& weights, const BoundParams& bp)
{
    if (dis_values.size() != weights.size() || dis_values.empty())
        throw std::invalid_argument(to_string(kind) + ": disintegrated values and weights differ in length");
    const auto rule = detail::sqrt_rule(kind, bp);
    detail::check_terms(kind, dis_values, static_cast<int>(dis_values.size()));
    BoundValue out;
    out.kind = kind;
    out.coefficient = rule.coefficient;
    double inner = 0.0;
    for (std::size_t z = 0; z < dis_values.size(); ++z) {
        inner += weights[z] * std::sqrt(rule.coefficient * dis_values[z]);
        out.info_total += weights[z] * dis_values[z];
    }
    out.value = rule.terms * inner;
    out.info_total *= rule.terms;
    out.n = bp.n; out.m = bp.m; out.k = bp.k;
    out.delta = bp.delta.value_or(1.0);
    return out;
}

struct LambdaRange {
    double lo = 1e-4;
    double hi = 1e4;
    int points = 400;
    double rel_tol = 1e-8;
};

struct LambdaOptimum {
    double value;
    double lambda;
};

// inf over lambda of (info + psi(lambda)) / lambda.
inline LambdaOptimum lambda_optimize(double info, const std::function<double(double)>& psi, const LambdaRange& range = {})
{
    if (!(range.lo > 0.0 && range.hi > range.lo) || range.points < 2)
        throw std::invalid_argument("lambda_optimize: invalid lambda range");
    const double llo = std::log(range.lo), lhi = std::log(range.hi);
    const double step = (lhi - llo) / (range.points - 1);
    std::vector<double> f(range.points, kInf);
    int best = -1;
    for (int i = 0; i < range.points; ++i) {
        const double lam = std::exp(llo + step * i);
        const double ps = psi(lam);
        if (!std::isfinite(ps)) continue;
        f[i] = (info + ps) / lam;
        if (best < 0 || f[i] < f[best]) best = i;
    }
    if (best < 0) throw std::domain_error("lambda_optimize: psi is non-finite on the whole search range");
    const int a = (best > 0 && std::isfinite(f[best - 1])) ? best - 1 : best;
    const int b = (best + 1 < range.points && std::isfinite(f[best + 1])) ? best + 1 : best;
    LambdaOptimum out{f[best], std::exp(llo + step * best)};
    if (a < b) {
        auto obj = [&](double t) {
            const double lam = std::exp(t);
            const double ps = psi(lam);
            return std::isfinite(ps) ? (info + ps) / lam : kInf;
        };
        const auto r = golden_section_min(obj, llo + step * a, llo + step * b, range.rel_tol);
        if (r.fx < out.value) out = {r.fx, std::exp(r.x)};
    }
    return out;
}

// GENERAL_CGF: (1/terms) sum_i inf_lambda (I_i + psi(lambda)) / lambda.
inline BoundValue assemble_general(const std::vector<double>& per_term, const std::function<double(double)>& psi,
                                   const BoundParams& bp, const LambdaRange& range = {})
{
    if (per_term.empty()) throw std::invalid_argument("GENERAL_CGF: no per-term quantities");
    detail::check_terms(BoundKind::GENERAL_CGF, per_term, static_cast<int>(per_term.size()));
    BoundValue out;
    out.kind = BoundKind::GENERAL_CGF;
    out.coefficient = 1.0 / per_term.size();
    for (double v : per_term) {
        out.value += lambda_optimize(v, psi, range).value;
        out.info_total += v;
    }
    out.value *= out.coefficient;
    out.n = bp.n; out.m = bp.m; out.k = bp.k;
    out.delta = bp.delta.value_or(1.0);
    return out;
}

enum class JsMode { Blockwise, Single };

inline double js_budget(double info_sum, const PartitionConfig& cfg, JsMode mode)
{
    const double scale = (mode == JsMode::Blockwise) ? 2.0 : 1.0;
    return scale * info_sum / (cfg.n() + cfg.m());
}

// Upper bound on the population risk from the empirical risk and an information budget.
inline ProbValue js_population_bound(ProbValue emp_risk, double info_sum, const PartitionConfig& cfg, JsMode mode)
{
    if (!(info_sum >= 0.0)) throw std::invalid_argument("js_population_bound: info_sum must be >= 0");
    return d_js_inverse(training_prob(cfg).value(), emp_risk, js_budget(info_sum, cfg, mode));
}

inline BoundValue assemble_js(ProbValue emp_risk, double info_sum, const PartitionConfig& cfg, JsMode mode)
{
    BoundValue out;
    out.kind = (mode == JsMode::Blockwise) ? BoundKind::JS_PRED : BoundKind::JS_PRED_SINGLE;
    out.value = js_population_bound(emp_risk, info_sum, cfg, mode);
    out.coefficient = js_budget(1.0, cfg, mode);
    out.info_total = info_sum;
    out.n = cfg.n(); out.m = cfg.m(); out.k = cfg.k();
    return out;
}

} // namespace lmo
