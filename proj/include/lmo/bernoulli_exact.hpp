#pragma once

#include "lmo/info_measures.hpp"
#include "lmo/numeric.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmo {

enum class Provenance { ClosedForm, MonteCarlo, Oracle, Quadrature };

inline std::string to_string(Provenance p)
{
    switch (p) {
    case Provenance::ClosedForm: return "closed-form";
    case Provenance::MonteCarlo: return "monte-carlo";
    case Provenance::Oracle: return "oracle";
    case Provenance::Quadrature: return "quadrature";
    }
    return "unknown";
}

// A (conditional) mutual information in nats. For exchangeable terms every entry of
// per_term equals value; value is the single-index quantity.
struct InfoQuantity {
    std::string kind;
    double value = 0.0;
    std::vector<double> per_term;
    Provenance provenance = Provenance::ClosedForm;
    double std_error = 0.0;
};

enum class InfoKind { MI_FULL, IMI, IPMI_BLOCK, LOO_CMI, ICIMI, LMO_CMI, LOFO_CMI, MN_IPCIMI, SICIMI, LOO_SCMI, LMO_SCMI };

inline std::string to_string(InfoKind k)
{
    switch (k) {
    case InfoKind::MI_FULL: return "MI_FULL";
    case InfoKind::IMI: return "IMI";
    case InfoKind::IPMI_BLOCK: return "IPMI_BLOCK";
    case InfoKind::LOO_CMI: return "LOO_CMI";
    case InfoKind::ICIMI: return "ICIMI";
    case InfoKind::LMO_CMI: return "LMO_CMI";
    case InfoKind::LOFO_CMI: return "LOFO_CMI";
    case InfoKind::MN_IPCIMI: return "MN_IPCIMI";
    case InfoKind::SICIMI: return "SICIMI";
    case InfoKind::LOO_SCMI: return "LOO_SCMI";
    case InfoKind::LMO_SCMI: return "LMO_SCMI";
    }
    return "unknown";
}

inline const std::vector<InfoKind>& all_info_kinds()
{
    static const std::vector<InfoKind> kinds = {InfoKind::MI_FULL, InfoKind::IMI, InfoKind::IPMI_BLOCK, InfoKind::LOO_CMI,
                                                InfoKind::ICIMI, InfoKind::LMO_CMI, InfoKind::LOFO_CMI, InfoKind::MN_IPCIMI,
                                                InfoKind::SICIMI, InfoKind::LOO_SCMI, InfoKind::LMO_SCMI};
    return kinds;
}

// m = 0 means the MI family with no supersample; k = 0 means "implied by the kind".
struct BernoulliInstance {
    int n = 1;
    int m = 0;
    int k = 0;
    double p = 0.5;
};

// Bernstein weights B_{trials,x}(p), built in log space and normalized.
inline std::vector<double> binom_weights(int trials, ProbValue p)
{
    if (trials < 0 || trials > 1000000) throw std::invalid_argument("binom_weights: trials must be in [0, 1e6]");
    std::vector<double> w(trials + 1, 0.0);
    const double q = p;
    if (q == 0.0) { w[0] = 1.0; return w; }
    if (q == 1.0) { w[trials] = 1.0; return w; }
    const double lp = std::log(q), lq = std::log1p(-q);
    double mx = -kInf;
    for (int x = 0; x <= trials; ++x) {
        w[x] = log_binom(trials, x) + x * lp + (trials - x) * lq;
        mx = std::max(mx, w[x]);
    }
    double s = 0.0;
    for (auto& v : w) { v = std::exp(v - mx); s += v; }
    for (auto& v : w) v /= s;
    return w;
}

inline double binom_expect(int trials, ProbValue p, const std::function<double(int)>& f)
{
    const auto w = binom_weights(trials, p);
    double s = 0.0;
    for (int x = 0; x <= trials; ++x) {
        if (w[x] == 0.0) continue;
        const double v = f(x);
        if (!std::isfinite(v))
            throw std::domain_error("binom_expect: f(" + std::to_string(x) + ") is not finite at a point with nonzero weight");
        s += w[x] * v;
    }
    return s;
}

// E f(X, Y) with independent X ~ Bin(n1, p), Y ~ Bin(n2, p).
inline double binom_expect2(int n1, int n2, ProbValue p, const std::function<double(int, int)>& f)
{
    const auto wx = binom_weights(n1, p), wy = binom_weights(n2, p);
    double s = 0.0;
    for (int x = 0; x <= n1; ++x) {
        if (wx[x] == 0.0) continue;
        double inner = 0.0;
        for (int y = 0; y <= n2; ++y) {
            if (wy[y] == 0.0) continue;
            const double v = f(x, y);
            if (!std::isfinite(v))
                throw std::domain_error("binom_expect2: f(" + std::to_string(x) + "," + std::to_string(y) + ") is not finite");
            inner += wy[y] * v;
        }
        s += wx[x] * inner;
    }
    return s;
}

inline double true_gen_error(int n, ProbValue p)
{
    if (n < 1) throw std::invalid_argument("true_gen_error: n must be >= 1");
    return 2.0 * p * (1.0 - p) / n;
}

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw std::invalid_argument(what);
}

inline void require_k(const BernoulliInstance& in, InfoKind kind, int implied)
{
    require(in.k == 0 || in.k == implied, to_string(kind) + ": block count k=" + std::to_string(in.k) +
                                              " must equal the implied k=" + std::to_string(implied));
}

inline int term_count(InfoKind kind, const BernoulliInstance& in)
{
    switch (kind) {
    case InfoKind::MI_FULL: case InfoKind::LOO_CMI: case InfoKind::LMO_CMI: return 1;
    case InfoKind::IMI: case InfoKind::ICIMI: case InfoKind::MN_IPCIMI: case InfoKind::SICIMI: return in.n;
    case InfoKind::IPMI_BLOCK: return in.k;
    case InfoKind::LOFO_CMI: return in.m;
    case InfoKind::LOO_SCMI: return in.n + 1;
    case InfoKind::LMO_SCMI: return in.n + in.m;
    }
    return 1;
}

// Validates and returns the effective (n, m) used by the formula.
inline BernoulliInstance normalize(InfoKind kind, BernoulliInstance in)
{
    const std::string name = to_string(kind);
    require(in.n >= 1, name + ": n must be >= 1");
    require(in.p >= 0.0 && in.p <= 1.0, name + ": p outside [0,1]");
    switch (kind) {
    case InfoKind::MI_FULL: case InfoKind::IMI:
        break;
    case InfoKind::IPMI_BLOCK:
        require(in.k >= 1, name + ": k must be >= 1");
        require(in.n % in.k == 0, name + ": k=" + std::to_string(in.k) + " does not divide n=" + std::to_string(in.n));
        break;
    case InfoKind::LOO_CMI:
        require(in.m == 0 || in.m == 1, name + ": requires m=1");
        require_k(in, kind, 1);
        in.m = 1; in.k = 1;
        break;
    case InfoKind::ICIMI: case InfoKind::SICIMI:
        require(in.m == 0 || in.m == in.n, name + ": requires m=n");
        if (kind == InfoKind::ICIMI) require_k(in, kind, in.n);
        in.m = in.n; in.k = (kind == InfoKind::ICIMI) ? in.n : in.k;
        break;
    case InfoKind::LOO_SCMI:
        require(in.m == 0 || in.m == 1, name + ": requires m=1");
        in.m = 1;
        break;
    case InfoKind::LMO_CMI:
        require(in.m >= 1, name + ": requires m >= 1");
        require_k(in, kind, 1);
        in.k = 1;
        break;
    case InfoKind::LOFO_CMI:
        require(in.m >= 1, name + ": requires m >= 1");
        require(in.n % in.m == 0, name + ": requires m | n (m=" + std::to_string(in.m) + ", n=" + std::to_string(in.n) + ")");
        require_k(in, kind, in.m);
        in.k = in.m;
        break;
    case InfoKind::MN_IPCIMI:
        require(in.m >= 1, name + ": requires m >= 1");
        require(in.m % in.n == 0, name + ": requires n | m (n=" + std::to_string(in.n) + ", m=" + std::to_string(in.m) + ")");
        require_k(in, kind, in.n);
        in.k = in.n;
        break;
    case InfoKind::LMO_SCMI:
        require(in.m >= 1, name + ": requires m >= 1");
        break;
    }
    return in;
}

inline double lmo_scmi_value(int n, int m, double p)
{
    const double q = 1.0 - p, nm = static_cast<double>(n) * m, a = double(m) / (n + m), b = double(n) / (n + m);
    const double ex1 = binom_expect(n, p, [&](int x) { return a * std::log(m + x / p); });
    const double ey1 = binom_expect(n - 1, p, [&](int y) { return b * std::log(n + nm * p / (y + 1)); });
    const double ex0 = binom_expect(n, p, [&](int x) { return a * std::log(m + (n - x) / q); });
    const double ey0 = binom_expect(n - 1, p, [&](int y) { return b * std::log(n + nm * q / (n - y)); });
    return std::log(static_cast<double>(n + m)) - p * (ex1 + ey1) - q * (ex0 + ey0);
}

inline double closed_form(InfoKind kind, const BernoulliInstance& in)
{
    const int n = in.n, m = in.m;
    const double p = in.p, q = 1.0 - p, alpha = q / p, beta = p / q;
    switch (kind) {
    case InfoKind::MI_FULL:
        return -binom_expect(n, p, [&](int x) { return log_binom(n, x) + x * std::log(p) + (n - x) * std::log(q); });
    case InfoKind::IMI:
        return binary_entropy(p) - std::log(static_cast<double>(n)) +
               p * binom_expect(n - 1, p, [](int x) { return std::log(x + 1.0); }) +
               q * binom_expect(n - 1, p, [&](int x) { return std::log(static_cast<double>(n - x)); });
    case InfoKind::IPMI_BLOCK: {
        const int t = n / in.k;
        return binom_expect2(t, n - t, p, [&](int x, int y) {
            return log_binom(n - t, y) - log_binom(n, x + y) - x * std::log(p) - (t - x) * std::log(q);
        });
    }
    case InfoKind::LOO_CMI:
        return std::log(n + 1.0) - binom_expect(n, p, [&](int x) { return q * std::log(n + 1.0 - x) + p * std::log(x + 1.0); });
    case InfoKind::ICIMI: {
        const double e1 = binom_expect(n - 1, p, [&](int x) { return std::log(alpha * x / (n - x) + 1.0); });
        const double e2 = binom_expect(n - 1, p, [&](int x) { return std::log(beta * (n - 1 - x) / (x + 1.0) + 1.0); });
        return p * q * (2.0 * kLn2 - e1 - e2);
    }
    case InfoKind::LMO_CMI:
        return log_binom(n + m, n) - binom_expect2(n, m, p, [&](int x, int y) {
                   return log_binom(x + y, x) + log_binom(n - x + m - y, n - x);
               });
    case InfoKind::LOFO_CMI: {
        const int t = n / m, big = n - t;
        const double e1 = binom_expect2(big, t, p, [&](int x, int y) {
            return std::log(y + 1.0 + alpha * x * (t - y) / (big - x + 1.0));
        });
        const double e0 = binom_expect2(big, t, p, [&](int x, int y) {
            return std::log(t - y + 1.0 + beta * (big - x) * y / (x + 1.0));
        });
        return std::log(t + 1.0) - p * e1 - q * e0;
    }
    case InfoKind::MN_IPCIMI: {
        const int t = m / n, big = n - 1;
        const double e1 = binom_expect2(big, t, p, [&](int x, int y) {
            return std::log(y + 1.0 + beta * (big - x) * (t - y) / (x + 1.0));
        });
        const double e0 = binom_expect2(big, t, p, [&](int x, int y) {
            return std::log(t - y + 1.0 + alpha * x * y / (big - x + 1.0));
        });
        return std::log(t + 1.0) - p * e1 - q * e0;
    }
    case InfoKind::SICIMI: {
        const double e1 = binom_expect(n, p, [&](int x) { return std::log(1.0 + x / (n * p)); }) +
                          binom_expect(n - 1, p, [&](int y) { return std::log(1.0 + n * p / (y + 1.0)); });
        const double e0 = binom_expect(n, p, [&](int x) { return std::log(1.0 + (n - x) / (n * q)); }) +
                          binom_expect(n - 1, p, [&](int y) { return std::log(1.0 + n * q / (n - y)); });
        return kLn2 - 0.5 * p * e1 - 0.5 * q * e0;
    }
    case InfoKind::LOO_SCMI: {
        const double e1 = binom_expect(n, p, [&](int x) { return std::log(1.0 + x / p); }) +
                          n * binom_expect(n - 1, p, [&](int y) { return std::log(n + n * p / (y + 1.0)); });
        const double e0 = binom_expect(n, p, [&](int x) { return std::log(1.0 + (n - x) / q); }) +
                          n * binom_expect(n - 1, p, [&](int y) { return std::log(n + n * q / (n - y)); });
        return std::log(n + 1.0) - p / (n + 1.0) * e1 - q / (n + 1.0) * e0;
    }
    case InfoKind::LMO_SCMI:
        return lmo_scmi_value(n, m, p);
    }
    return 0.0;
}

// theta-weighted JS divergence between P(W | Z_j = z, T_j = 1) and P(W | T_j = 0).
inline double dis_scmi_value(int n, int m, double p, int z)
{
    const double theta = static_cast<double>(n) / (n + m);
    const auto b1 = binom_weights(n - 1, p), b0 = binom_weights(n, p);
    double s = 0.0;
    for (int x = 0; x <= n; ++x) {
        const int xs = x - z;
        const double p1 = (xs >= 0 && xs <= n - 1) ? b1[xs] : 0.0;
        const double p0 = b0[x];
        const double mix = theta * p1 + (1.0 - theta) * p0;
        if (p1 > 0.0) s += theta * p1 * std::log(p1 / mix);
        if (p0 > 0.0) s += (1.0 - theta) * p0 * std::log(p0 / mix);
    }
    return std::max(s, 0.0);
}

inline int scmi_holdout(InfoKind kind, const BernoulliInstance& in)
{
    if (kind == InfoKind::SICIMI) return in.n;
    if (kind == InfoKind::LOO_SCMI) return 1;
    return in.m;
}

} // namespace detail

inline InfoQuantity info_quantity(InfoKind kind, const BernoulliInstance& instance)
{
    const BernoulliInstance in = detail::normalize(kind, instance);
    double v = 0.0;
    if (in.p > 0.0 && in.p < 1.0) v = std::max(detail::closed_form(kind, in), 0.0);
    InfoQuantity out;
    out.kind = to_string(kind);
    out.value = v;
    out.per_term.assign(detail::term_count(kind, in), v);
    out.provenance = Provenance::ClosedForm;
    return out;
}

inline InfoQuantity dis_info_quantity(InfoKind kind, const BernoulliInstance& instance, int conditioning_value)
{
    if (kind != InfoKind::LMO_SCMI && kind != InfoKind::SICIMI && kind != InfoKind::LOO_SCMI)
        throw std::invalid_argument("dis_info_quantity: " + to_string(kind) + " has no disintegrated form");
    if (conditioning_value != 0 && conditioning_value != 1)
        throw std::invalid_argument("dis_info_quantity: conditioning value must be 0 or 1");
    const BernoulliInstance in = detail::normalize(kind, instance);
    double v = 0.0;
    if (in.p > 0.0 && in.p < 1.0) v = detail::dis_scmi_value(in.n, detail::scmi_holdout(kind, in), in.p, conditioning_value);
    InfoQuantity out;
    out.kind = to_string(kind) + "|z=" + std::to_string(conditioning_value);
    out.value = v;
    out.per_term.assign(detail::term_count(kind, in), v);
    out.provenance = Provenance::ClosedForm;
    return out;
}

} // namespace lmo
