#pragma once

#include "lmo/bound_catalog.hpp"
#include "lmo/info_measures.hpp"
#include "lmo/numeric.hpp"
#include "lmo/supersample.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmo {

enum class GaussianLoss { Quadratic, TruncatedQuadratic };

struct GaussianInstance {
    int n = 10;
    int m = 1;
    double mu = 0.0;
    double sigma = 1.0;
    GaussianLoss loss = GaussianLoss::Quadratic;

    void validate() const
    {
        if (n < 1 || m < 1) throw std::invalid_argument("GaussianInstance: n, m must be positive");
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("GaussianInstance: sigma must be > 0");
        if (!std::isfinite(mu)) throw std::invalid_argument("GaussianInstance: mu must be finite");
    }
};

enum class CgfMode { Analytic, MonteCarlo };

struct McConfig {
    int outer_samples = 2000;
    int inner_samples = 20000;
    std::uint64_t seed = 1;
    LambdaRange lambda_range{};
    int quadrature_points = 201;
    CgfMode cgf = CgfMode::Analytic;

    void validate() const
    {
        if (outer_samples < 1 || inner_samples < 1) throw std::invalid_argument("McConfig: sample counts must be >= 1");
        if (quadrature_points < 51 || quadrature_points % 2 == 0)
            throw std::invalid_argument("McConfig: quadrature_points must be odd and >= 51");
    }
};

// A Gaussian-example bound; `kind` is the CSV name.
struct McBound {
    std::string kind;
    double value = 0.0;
    double std_error = 0.0;
    double info = 0.0;    // per-term information estimate
    double lambda = 0.0;  // optimizing lambda for the CGF forms, 0 otherwise
    int n = 0, m = 0, k = 0;
    Provenance provenance = Provenance::ClosedForm;
};

struct Normal {
    double mean;
    double variance;
};

inline double normal_log_pdf(double x, double mean, double var)
{
    const double d = x - mean;
    return -0.5 * d * d / var - 0.5 * std::log(2.0 * M_PI * var);
}

inline double normal_pdf(double x, double mean, double sd)
{
    const double d = (x - mean) / sd;
    return std::exp(-0.5 * d * d) / (sd * std::sqrt(2.0 * M_PI));
}

// sigma^2 * sqrt(2 (n+1)^2 / n^2 * log(n/(n-1))).
inline McBound gaussian_imi_closed(int n, double sigma)
{
    if (n < 2) throw std::invalid_argument("gaussian_imi_closed: n must be >= 2");
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_imi_closed: sigma must be > 0");
    const double nn = n;
    McBound out;
    out.kind = "IMI_GAUSS";
    out.value = sigma * sigma * std::sqrt(2.0 * (nn + 1) * (nn + 1) / (nn * nn) * std::log(nn / (nn - 1)));
    out.info = 0.5 * std::log(nn / (nn - 1));
    out.n = n;
    out.k = n;
    return out;
}

enum class ImiCgf { SubGaussian, ExactChiSquare };

// Per-sample IMI with a lambda-optimized CGF of the decoupled loss (W~ - Z~)^2, W~ - Z~ ~ N(0, s^2).
inline McBound gaussian_imi_general(int n, double sigma, ImiCgf cgf = ImiCgf::SubGaussian, const LambdaRange& range = {})
{
    if (n < 2) throw std::invalid_argument("gaussian_imi_general: n must be >= 2");
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_imi_general: sigma must be > 0");
    const double nn = n;
    const double info = 0.5 * std::log(nn / (nn - 1));
    const double s2 = sigma * sigma * (nn + 1) / nn;
    auto psi = [&](double lam) {
        if (cgf == ImiCgf::SubGaussian) return lam * lam * s2 * s2;
        return -0.5 * std::log1p(2.0 * lam * s2) + lam * s2;
    };
    const auto opt = lambda_optimize(info, psi, range);
    McBound out;
    out.kind = cgf == ImiCgf::SubGaussian ? "IMI_GENERAL" : "IMI_GENERAL_CHI2";
    out.value = opt.value;
    out.info = info;
    out.lambda = opt.lambda;
    out.n = n;
    out.k = n;
    return out;
}

inline double prob_w_positive(int n, double mu, double sigma) { return normal_cdf(std::sqrt(static_cast<double>(n)) * mu / sigma); }

// Law of W given the pair (z_a, z_b) and R = r: the selected sample plus n-1 unconditioned ones, averaged.
inline Normal posterior_given_pair(const GaussianInstance& inst, double z_a, double z_b, int r)
{
    inst.validate();
    if (r != 0 && r != 1) throw std::invalid_argument("posterior_given_pair: r must be 0 or 1");
    const double n = inst.n;
    const double chosen = r == 0 ? z_a : z_b;
    return {(chosen + (n - 1) * inst.mu) / n, (n - 1) * inst.sigma * inst.sigma / (n * n)};
}

// (1/N) sum_u KL(N(mu_u, var) || mixture) by Simpson quadrature; the grid is refined until the mixture integrates to 1.
inline double mixture_mi(const std::vector<double>& means, double var, int min_points = 201)
{
    if (means.empty()) throw std::invalid_argument("mixture_mi: no components");
    if (!(var > 0.0)) throw std::invalid_argument("mixture_mi: variance must be > 0");
    const double sd = std::sqrt(var);
    const auto [lo_it, hi_it] = std::minmax_element(means.begin(), means.end());
    const double lo = *lo_it - 10.0 * sd, hi = *hi_it + 10.0 * sd;
    const std::size_t count = means.size();
    const double log_n = std::log(static_cast<double>(count));
    int points = std::max(min_points, static_cast<int>(std::ceil((hi - lo) / (0.1 * sd))) | 1);
    std::vector<double> lp(count);
    for (int attempt = 0; attempt < 5; ++attempt, points = 2 * points + 1) {
        const double h = (hi - lo) / (points - 1);
        const auto w = simpson_weights(points, h);
        double mi = 0.0, mass = 0.0;
        for (int g = 0; g < points; ++g) {
            const double x = lo + h * g;
            for (std::size_t u = 0; u < count; ++u) lp[u] = normal_log_pdf(x, means[u], var);
            const double lmix = log_sum_exp(lp) - log_n;
            mass += w[g] * std::exp(lmix);
            double acc = 0.0;
            for (std::size_t u = 0; u < count; ++u) acc += std::exp(lp[u]) * (lp[u] - lmix);
            mi += w[g] * acc / static_cast<double>(count);
        }
        if (std::abs(mass - 1.0) <= 1e-10) return std::max(mi, 0.0);
    }
    throw std::runtime_error("mixture_mi: quadrature did not converge");
}

namespace detail {

// One conditioning draw of a block: CGF coefficients and the conditional information.
struct BlockDraw {
    std::vector<double> a;      // eps = a_u w + c_u
    std::vector<double> c;
    std::vector<double> means;  // E[W | block, u]
    double info = 0.0;
};

inline double analytic_psi(const BlockDraw& d, double var, double lam)
{
    const std::size_t count = d.a.size();
    std::vector<double> t;
    t.reserve(count * count);
    for (std::size_t u = 0; u < count; ++u)
        for (std::size_t v = 0; v < count; ++v)
            t.push_back(lam * d.c[u] + lam * d.a[u] * d.means[v] + 0.5 * lam * lam * d.a[u] * d.a[u] * var);
    return log_sum_exp(t) - 2.0 * std::log(static_cast<double>(count));
}

} // namespace detail

// General-form (m,k)-IPCIMI bound for Gaussian mean estimation with quadratic loss.
inline McBound ipcimi_general_mc(const GaussianInstance& inst, int k, const McConfig& mc, const std::string& name = "IPCIMI_GENERAL")
{
    inst.validate();
    mc.validate();
    if (inst.loss != GaussianLoss::Quadratic) throw std::invalid_argument(name + ": requires the quadratic loss");
    const PartitionConfig cfg(inst.n, inst.m, k);
    if (cfg.train_per_block() == inst.n) throw std::invalid_argument(name + ": needs k >= 2 so that W keeps a random part");
    const int b = cfg.block_size();
    const double n = inst.n, m = inst.m, kk = k;
    const double rest = n - cfg.train_per_block();
    const double var = rest * inst.sigma * inst.sigma / (n * n);
    const auto subsets = enumerate_subsets(b, cfg.train_per_block());
    const std::size_t count = subsets.size();

    std::vector<detail::BlockDraw> draws(mc.outer_samples);
    std::vector<double> zs(b);
    for (int s = 0; s < mc.outer_samples; ++s) {
        Rng rng = make_rng(mc.seed, static_cast<std::uint64_t>(s));
        std::normal_distribution<double> z(inst.mu, inst.sigma);
        for (auto& x : zs) x = z(rng);
        double all = 0.0, all2 = 0.0;
        for (double x : zs) { all += x; all2 += x * x; }
        auto& d = draws[s];
        for (const auto& u : subsets) {
            double tr = 0.0, tr2 = 0.0;
            for (int j : u) { tr += zs[j]; tr2 += zs[j] * zs[j]; }
            d.a.push_back(-2.0 * (kk / m * (all - tr) - kk / n * tr));
            d.c.push_back(kk / m * (all2 - tr2) - kk / n * tr2);
            d.means.push_back((tr + rest * inst.mu) / n);
        }
        d.info = mixture_mi(d.means, var, mc.quadrature_points);
    }

    // Per-draw psi(lambda): analytic, or an inner Monte-Carlo estimate from stored error samples.
    std::vector<std::vector<double>> eps;
    if (mc.cgf == CgfMode::MonteCarlo) {
        if (static_cast<double>(mc.outer_samples) * mc.inner_samples > 5e7)
            throw std::invalid_argument(name + ": Monte-Carlo CGF mode is limited to 5e7 stored samples");
        eps.resize(mc.outer_samples);
        for (int s = 0; s < mc.outer_samples; ++s) {
            Rng rng = make_rng(mc.seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(s));
            std::uniform_int_distribution<std::size_t> pick(0, count - 1);
            std::normal_distribution<double> noise(0.0, std::sqrt(var));
            eps[s].resize(mc.inner_samples);
            for (auto& e : eps[s]) {
                const std::size_t u = pick(rng), v = pick(rng);
                e = draws[s].a[u] * (draws[s].means[v] + noise(rng)) + draws[s].c[u];
            }
        }
    }
    auto psi_of = [&](int s, double lam) {
        if (mc.cgf == CgfMode::Analytic) return detail::analytic_psi(draws[s], var, lam);
        std::vector<double> t(eps[s].size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = lam * eps[s][i];
        return log_sum_exp(t) - std::log(static_cast<double>(t.size()));
    };

    RunningStats info;
    for (const auto& d : draws) info.add(d.info);
    auto mean_psi = [&](double lam) {
        double acc = 0.0;
        for (int s = 0; s < mc.outer_samples; ++s) acc += psi_of(s, lam);
        return acc / mc.outer_samples;
    };
    const auto opt = lambda_optimize(info.mean, mean_psi, mc.lambda_range);
    RunningStats joint;
    for (int s = 0; s < mc.outer_samples; ++s) joint.add(draws[s].info + psi_of(s, opt.lambda));

    McBound out;
    out.kind = name;
    out.value = opt.value;
    out.std_error = joint.stderr_of_mean() / opt.lambda;
    out.info = info.mean;
    out.lambda = opt.lambda;
    out.n = inst.n; out.m = inst.m; out.k = k;
    out.provenance = Provenance::MonteCarlo;
    return out;
}

enum class GeneralKind { ICIMI_GENERAL, LOFO_GENERAL };

inline std::string to_string(GeneralKind k) { return k == GeneralKind::ICIMI_GENERAL ? "ICIMI_GENERAL" : "LOFO_GENERAL"; }

// ICIMI_GENERAL uses (m, k) = (n, n); LOFO_GENERAL uses k = m.
inline McBound general_bound_mc(GeneralKind kind, const GaussianInstance& inst, const McConfig& mc)
{
    if (kind == GeneralKind::ICIMI_GENERAL) {
        GaussianInstance sym = inst;
        sym.m = inst.n;
        return ipcimi_general_mc(sym, inst.n, mc, to_string(kind));
    }
    if (inst.n % inst.m != 0) throw std::invalid_argument("LOFO_GENERAL: m must divide n");
    return ipcimi_general_mc(inst, inst.m, mc, to_string(kind));
}

// ---- Maximum-likelihood sign rule with truncated quadratic loss ----

enum class FiniteKind { IMI, ICIMI, LOO_CMI, LOFO_CMI };

inline std::string to_string(FiniteKind k)
{
    switch (k) {
    case FiniteKind::IMI: return "IMI";
    case FiniteKind::ICIMI: return "ICIMI";
    case FiniteKind::LOO_CMI: return "LOO_CMI";
    case FiniteKind::LOFO_CMI: return "LOFO_CMI";
    }
    return "?";
}

namespace detail {

// P(W = -mu) when `known` is the sum of the conditioned training samples and `count` samples remain unconditioned.
inline double minus_prob(double known, int count, const GaussianInstance& g)
{
    if (count == 0) return known < 0.0 ? 1.0 : 0.0;
    return normal_cdf(-(known + count * g.mu) / (g.sigma * std::sqrt(static_cast<double>(count))));
}

inline double truncated_loss(double w, double z) { return std::min((w - z) * (w - z), 1.0); }

// Importance-sampled E over a block of b samples of f(block). The proposal mixes the data law with
// b components that move every sample except one to mean zero.
template <class F>
RunningStats block_is_mean(const GaussianInstance& g, int b, const McConfig& mc, std::uint64_t stream, F f)
{
    RunningStats st;
    std::vector<double> x(b), lr(b);
    const double s2 = g.sigma * g.sigma;
    for (int s = 0; s < mc.outer_samples; ++s) {
        Rng rng = make_rng(mc.seed ^ stream, static_cast<std::uint64_t>(s));
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        std::normal_distribution<double> noise(0.0, g.sigma);
        int keep = -1;  // -1: data law
        if (coin(rng) >= 0.5) keep = std::uniform_int_distribution<int>(0, b - 1)(rng);
        for (int j = 0; j < b; ++j) x[j] = noise(rng) + ((keep < 0 || j == keep) ? g.mu : 0.0);
        // log N(x;0,s2) - log N(x;mu,s2) per sample.
        double total = 0.0;
        for (int j = 0; j < b; ++j) { lr[j] = (g.mu * g.mu - 2.0 * x[j] * g.mu) / (2.0 * s2); total += lr[j]; }
        std::vector<double> comp(b);
        for (int u = 0; u < b; ++u) comp[u] = total - lr[u];
        const double log_ratio = std::log(0.5 + 0.5 * std::exp(log_sum_exp(comp) - std::log(static_cast<double>(b))));
        st.add(std::exp(-log_ratio) * f(x));
    }
    return st;
}

} // namespace detail

// Per-term information for the sign rule.
inline InfoQuantity finite_w_info(FiniteKind kind, const GaussianInstance& inst, const McConfig& mc)
{
    inst.validate();
    mc.validate();
    if (inst.n < 2) throw std::invalid_argument("finite_w_info: n must be >= 2");
    const auto& g = inst;
    const int n = inst.n;
    InfoQuantity out;
    out.kind = to_string(kind);
    if (kind == FiniteKind::IMI || kind == FiniteKind::ICIMI) {
        const int points = std::max(mc.quadrature_points, 801) | 1;
        const double lo = g.mu - 12.0 * g.sigma, hi = g.mu + 12.0 * g.sigma, h = (hi - lo) / (points - 1);
        const auto w = simpson_weights(points, h);
        std::vector<double> q(points), dens(points);
        for (int i = 0; i < points; ++i) {
            const double z = lo + h * i;
            q[i] = detail::minus_prob(z, n - 1, g);
            dens[i] = normal_pdf(z, g.mu, g.sigma);
        }
        double v = 0.0;
        if (kind == FiniteKind::IMI) {
            const double qbar = normal_cdf(-std::sqrt(static_cast<double>(n)) * g.mu / g.sigma);
            for (int i = 0; i < points; ++i) v += w[i] * dens[i] * d_kl_binary(q[i], qbar);
        } else {
            for (int i = 0; i < points; ++i)
                for (int j = 0; j < points; ++j) v += w[i] * w[j] * dens[i] * dens[j] * d_js(0.5, q[i], q[j]);
        }
        out.value = std::max(v, 0.0);
        out.provenance = Provenance::Quadrature;
    } else {
        const int m = kind == FiniteKind::LOO_CMI ? 1 : inst.m;
        if (n % m != 0) throw std::invalid_argument("LOFO_CMI: m must divide n");
        const int t = n / m, b = t + 1, rest = n - t;
        std::vector<double> q(b);
        const auto st = detail::block_is_mean(g, b, mc, 0x9e3779b9ULL + static_cast<std::uint64_t>(kind), [&](const std::vector<double>& x) {
            double total = 0.0;
            for (double v : x) total += v;
            double qbar = 0.0;
            for (int u = 0; u < b; ++u) { q[u] = detail::minus_prob(total - x[u], rest, g); qbar += q[u]; }
            qbar /= b;
            if (rest == 0) return binary_entropy(std::clamp(qbar, 0.0, 1.0));
            double acc = 0.0;
            for (int u = 0; u < b; ++u) acc += d_kl_binary(q[u], std::clamp(qbar, 0.0, 1.0));
            return acc / b;
        });
        out.value = std::max(st.mean, 0.0);
        out.std_error = st.stderr_of_mean();
        out.provenance = Provenance::MonteCarlo;
    }
    out.per_term = {out.value};
    return out;
}

inline McBound finite_w_bound(FiniteKind kind, const GaussianInstance& inst, const McConfig& mc)
{
    if (inst.loss != GaussianLoss::TruncatedQuadratic) throw std::invalid_argument("finite_w_bound: requires the truncated loss");
    const auto info = finite_w_info(kind, inst, mc);
    BoundParams bp{inst.n, inst.m, 0, std::nullopt};
    BoundKind bk = BoundKind::IMI;
    switch (kind) {
    case FiniteKind::IMI: bk = BoundKind::IMI; bp.m = 0; bp.k = inst.n; break;
    case FiniteKind::ICIMI: bk = BoundKind::ICIMI; bp.m = inst.n; bp.k = inst.n; break;
    case FiniteKind::LOO_CMI: bk = BoundKind::LOO_CMI; bp.m = 1; bp.k = 1; break;
    case FiniteKind::LOFO_CMI: bk = BoundKind::LOFO_CMI; bp.k = inst.m; break;
    }
    const int terms = bound_term_count(bk, bp);
    const auto bv = assemble(bk, std::vector<double>(terms, info.value), bp);
    McBound out;
    out.kind = to_string(kind);
    out.value = bv.value;
    out.info = info.value;
    out.n = inst.n; out.m = bp.m; out.k = bp.k;
    out.provenance = info.provenance;
    // Delta method for terms * sqrt(coef * I).
    if (info.value > 0.0) out.std_error = terms * std::sqrt(bv.coefficient) * info.std_error / (2.0 * std::sqrt(info.value));
    else out.std_error = terms * std::sqrt(bv.coefficient * info.std_error);
    return out;
}

// E[l(W, Z')] - E[l(W, Z_1)] for the sign rule, by quadrature.
inline double finite_w_true_gen(const GaussianInstance& inst, int points = 2001)
{
    inst.validate();
    const auto& g = inst;
    points |= 1;
    const double lo = g.mu - 12.0 * g.sigma, hi = g.mu + 12.0 * g.sigma, h = (hi - lo) / (points - 1);
    const auto w = simpson_weights(points, h);
    const double qbar = normal_cdf(-std::sqrt(static_cast<double>(g.n)) * g.mu / g.sigma);
    double gen = 0.0;
    for (int i = 0; i < points; ++i) {
        const double z = lo + h * i, d = normal_pdf(z, g.mu, g.sigma);
        const double q = detail::minus_prob(z, g.n - 1, g);
        gen += w[i] * d * (qbar - q) * (detail::truncated_loss(-g.mu, z) - detail::truncated_loss(g.mu, z));
    }
    return gen;
}

} // namespace lmo
