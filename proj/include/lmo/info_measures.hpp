#pragma once

#include "lmo/numeric.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lmo {

class ProbValue {
public:
    ProbValue(double v) : value_(v)  // NOLINT(google-explicit-constructor)
    {
        if (std::isnan(v) || v < 0.0 || v > 1.0)
            throw std::domain_error("ProbValue: " + std::to_string(v) + " outside [0,1]");
    }
    operator double() const { return value_; }  // NOLINT(google-explicit-constructor)
    double value() const { return value_; }

private:
    double value_;
};

class JsWeight {
public:
    JsWeight(double theta) : theta_(theta)  // NOLINT(google-explicit-constructor)
    {
        if (!(theta > 0.0 && theta < 1.0))
            throw std::domain_error("JsWeight: " + std::to_string(theta) + " outside (0,1)");
    }
    operator double() const { return theta_; }  // NOLINT(google-explicit-constructor)
    double theta() const { return theta_; }

private:
    double theta_;
};

inline double binary_entropy(ProbValue p)
{
    const double x = p;
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log(x) - (1.0 - x) * std::log1p(-x);
}

// Returns +inf when q sits on {0,1} and p does not (divergence infinite).
inline double d_kl_binary(ProbValue p, ProbValue q)
{
    const double a = p, b = q;
    if (a == b) return 0.0;
    if ((a > 0.0 && b == 0.0) || (a < 1.0 && b == 1.0)) return kInf;
    // p g(q/p) + (1-p) g((1-q)/(1-p)) with g(r) = r - 1 - log r; stable for tiny p, q.
    const double head = (a == 0.0) ? b : a * rel_entropy_kernel(b / a);
    const double tail = (a == 1.0) ? (1.0 - b) : (1.0 - a) * rel_entropy_kernel(1.0 + (a - b) / (1.0 - a));
    return head + tail;
}

inline bool kl_is_infinite(ProbValue p, ProbValue q) { return std::isinf(d_kl_binary(p, q)); }

// gamma p - log(1 - q + q e^gamma); its supremum over gamma is d_kl_binary(p, q).
inline double d_gamma(double gamma, ProbValue p, ProbValue q)
{
    if (!std::isfinite(gamma)) throw std::domain_error("d_gamma: gamma must be finite");
    const double b = q;
    double lmgf;
    if (gamma > 0.0)
        lmgf = gamma + std::log(b + (1.0 - b) * std::exp(-gamma));
    else
        lmgf = std::log1p(b * std::expm1(gamma));
    return gamma * static_cast<double>(p) - lmgf;
}

// sup over gamma of d_gamma: uniform 2001-point scan of [-30, 30], then golden-section polish.
inline double d_gamma_sup(ProbValue p, ProbValue q)
{
    const int points = 2001;
    const double lo = -30.0, hi = 30.0, h = (hi - lo) / (points - 1);
    int best = 0;
    double best_v = -kInf;
    for (int i = 0; i < points; ++i) {
        const double v = d_gamma(lo + h * i, p, q);
        if (v > best_v) { best_v = v; best = i; }
    }
    const double a = lo + h * std::max(best - 1, 0);
    const double b = lo + h * std::min(best + 1, points - 1);
    auto r = golden_section_min([&](double g) { return -d_gamma(g, p, q); }, a, b, 1e-12);
    return std::max(best_v, -r.fx);
}

inline double d_js(JsWeight theta, ProbValue p, ProbValue q)
{
    const double t = theta, a = p, b = q;
    if (a == b) return 0.0;
    const double mix = t * a + (1.0 - t) * b;
    return t * d_kl_binary(a, mix) + (1.0 - t) * d_kl_binary(b, mix);
}

// sup{q in [p,1] : d_js(theta, p, q) <= c} by bisection.
inline ProbValue d_js_inverse(JsWeight theta, ProbValue p, double c, double tol = 1e-10, int max_iter = 200)
{
    if (!(c >= 0.0)) throw std::domain_error("d_js_inverse: c must be >= 0");
    double lo = p, hi = 1.0;
    if (d_js(theta, p, hi) <= c) return 1.0;
    for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (d_js(theta, p, mid) <= c) lo = mid; else hi = mid;
    }
    return lo;
}

} // namespace lmo
