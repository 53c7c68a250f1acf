#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmo {

inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double log_binom(double a, double b)
{
    return std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0);
}

inline double log_sum_exp(const double* v, std::size_t n)
{
    double mx = -kInf;
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, v[i]);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(v[i] - mx);
    return mx + std::log(s);
}

inline double log_sum_exp(const std::vector<double>& v) { return log_sum_exp(v.data(), v.size()); }

// P(N(0,1) <= x), accurate in the lower tail.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// r - 1 - log r for r > 0, without cancellation near r = 1.
inline double rel_entropy_kernel(double r)
{
    const double x = r - 1.0;
    if (std::abs(x) < 1e-2) {
        double term = x * x, s = 0.0;
        for (int j = 2; j <= 12; ++j) {
            s += ((j % 2 == 0) ? 1.0 : -1.0) * term / j;
            term *= x;
        }
        return s;
    }
    return x - std::log(r);
}

struct GoldenResult {
    double x;
    double fx;
};

// Minimizes a unimodal f on [a, b].
inline GoldenResult golden_section_min(const std::function<double(double)>& f, double a, double b,
                                       double rel_tol = 1e-10, int max_iter = 300)
{
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > rel_tol * (std::abs(a) + std::abs(b)); ++it) {
        if (fc <= fd) {
            b = d; d = c; fd = fc;
            c = b - g * (b - a); fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + g * (b - a); fd = f(d);
        }
    }
    return fc <= fd ? GoldenResult{c, fc} : GoldenResult{d, fd};
}

// Composite Simpson weights for an odd number of equally spaced nodes.
inline std::vector<double> simpson_weights(int points, double h)
{
    if (points < 3 || points % 2 == 0) throw std::invalid_argument("simpson_weights: points must be odd and >= 3");
    std::vector<double> w(points);
    for (int i = 0; i < points; ++i) w[i] = (i == 0 || i == points - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    for (auto& x : w) x *= h / 3.0;
    return w;
}

// Seeding contract: one 64-bit base seed plus a task index gives an independent stream.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t task)
{
    return splitmix64(splitmix64(base) ^ splitmix64(task + 0x632be59bd9b4e019ULL));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t base, std::uint64_t task = 0) { return Rng(derive_seed(base, task)); }

// Streaming mean / variance (Welford).
struct RunningStats {
    long long count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x)
    {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }
    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    double stderr_of_mean() const { return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0; }
};

} // namespace lmo
