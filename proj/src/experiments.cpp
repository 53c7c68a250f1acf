#include "lmo/experiments.hpp"

#include "lmo/bernoulli_exact.hpp"
#include "lmo/bound_catalog.hpp"
#include "lmo/oracle.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace lmo {

namespace {

const std::vector<int> kLogGridM = {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000};

std::string param_string(Family f, double p, double mu, double sigma)
{
    if (f == Family::Bernoulli) return "p=" + format_number(p);
    return "mu=" + format_number(mu) + ";sigma=" + format_number(sigma);
}

ResultRow make_row(const std::string& bound, int n, int m, int k, double value, double se, Provenance prov)
{
    ResultRow r;
    r.bound = bound;
    r.n = n; r.m = m; r.k = k;
    r.value = value;
    r.std_error = se;
    r.provenance = to_string(prov);
    return r;
}

std::optional<std::pair<InfoKind, BoundKind>> bernoulli_kind(const std::string& name)
{
    static const std::map<std::string, std::pair<InfoKind, BoundKind>> table = {
        {"MI", {InfoKind::MI_FULL, BoundKind::MI}},
        {"IMI", {InfoKind::IMI, BoundKind::IMI}},
        {"IPMI", {InfoKind::IPMI_BLOCK, BoundKind::IPMI}},
        {"ICIMI", {InfoKind::ICIMI, BoundKind::ICIMI}},
        {"LOO_CMI", {InfoKind::LOO_CMI, BoundKind::LOO_CMI}},
        {"LMO_CMI", {InfoKind::LMO_CMI, BoundKind::LMO_CMI}},
        {"LOFO_CMI", {InfoKind::LOFO_CMI, BoundKind::LOFO_CMI}},
        {"MN_IPCIMI", {InfoKind::MN_IPCIMI, BoundKind::MN_IPCIMI}},
        {"SICIMI", {InfoKind::SICIMI, BoundKind::SICIMI}},
        {"LOO_SCMI", {InfoKind::LOO_SCMI, BoundKind::LOO_SCMI}},
        {"LMO_SCMI", {InfoKind::LMO_SCMI, BoundKind::LMO_SCMI}},
    };
    if (auto it = table.find(name); it != table.end()) return it->second;
    return std::nullopt;
}

// Effective (m, k) a Bernoulli kind is evaluated at, given the grid point.
std::pair<int, int> bernoulli_mk(InfoKind kind, int n, int m, int k)
{
    switch (kind) {
    case InfoKind::MI_FULL: case InfoKind::IMI: return {0, 1};
    case InfoKind::IPMI_BLOCK: return {0, k};
    case InfoKind::LOO_CMI: case InfoKind::LOO_SCMI: return {1, 1};
    case InfoKind::ICIMI: case InfoKind::SICIMI: return {n, n};
    case InfoKind::LMO_CMI: case InfoKind::LMO_SCMI: return {m, 1};
    case InfoKind::LOFO_CMI: return {m, m};
    case InfoKind::MN_IPCIMI: return {m, n};
    }
    return {m, k};
}

ResultRow evaluate_bernoulli(const std::string& bound, int n, int m, int k, double p)
{
    if (bound == "TRUE_GEN") return make_row(bound, n, m, k, true_gen_error(n, p), 0.0, Provenance::ClosedForm);
    std::string base = bound;
    const bool dis = base.size() > 4 && base.substr(base.size() - 4) == "_DIS";
    if (dis) base = base.substr(0, base.size() - 4);
    const auto kinds = bernoulli_kind(base);
    if (!kinds) throw std::invalid_argument("unknown Bernoulli bound " + bound);
    const auto [ikind, bkind] = *kinds;
    const auto [em, ek] = bernoulli_mk(ikind, n, m, k);
    const bool scmi = ikind == InfoKind::LMO_SCMI || ikind == InfoKind::SICIMI || ikind == InfoKind::LOO_SCMI;
    BernoulliInstance inst{n, em, scmi ? 0 : ek, p};
    if (ikind == InfoKind::MI_FULL || ikind == InfoKind::IMI) inst.k = 0;
    BoundParams bp{n, em, ek, std::nullopt};
    if (bkind == BoundKind::LMO_CMI) bp.delta = 1.0;  // squared loss on [0,1]
    if (dis) {
        if (!scmi) throw std::invalid_argument(bound + ": no disintegrated form");
        const double v0 = dis_info_quantity(ikind, inst, 0).value, v1 = dis_info_quantity(ikind, inst, 1).value;
        const auto bv = assemble_disintegrated(bkind, {v0, v1}, {1.0 - p, p}, bp);
        return make_row(bound, n, em, ek, bv.value, 0.0, Provenance::ClosedForm);
    }
    const auto q = info_quantity(ikind, inst);
    const auto bv = assemble(bkind, q, bp);
    return make_row(bound, n, em, ek, bv.value, 0.0, Provenance::ClosedForm);
}

ResultRow from_mc(const McBound& b)
{
    return make_row(b.kind, b.n, b.m, b.k, b.value, b.std_error, b.provenance);
}

} // namespace

std::string format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

SweepSpec preset(const std::string& figure)
{
    SweepSpec s;
    s.figure = figure;
    if (figure == "fig4") {
        s.family = Family::Bernoulli;
        s.n_grid = {10};
        s.m_grid = kLogGridM;
        s.p_grid = {0.4};
        s.bounds = {"TRUE_GEN", "MI", "IMI", "ICIMI", "LOO_CMI", "LMO_CMI", "MN_IPCIMI"};
    } else if (figure == "fig5") {
        s.family = Family::Gaussian;
        s.n_grid = {10, 20, 40, 80};
        s.m_half = true;
        s.mu = 0.0;
        s.sigma = 1.0;
        s.bounds = {"TRUE_GEN", "IMI_GAUSS", "ICIMI_GENERAL", "LOFO_GENERAL"};
    } else if (figure == "fig6") {
        s.family = Family::GaussianFiniteW;
        s.n_grid = {10, 20, 40, 80};
        s.m_grid = {2};
        s.mu = 1.0;
        s.sigma = 0.5;
        s.bounds = {"TRUE_GEN", "IMI", "ICIMI", "LOO_CMI", "LOFO_CMI"};
    } else if (figure == "fig7") {
        s.family = Family::Bernoulli;
        s.n_grid = {10};
        s.m_grid = kLogGridM;
        s.p_grid = {0.25};
        s.bounds = {"TRUE_GEN", "SICIMI_DIS", "LOO_SCMI_DIS", "LMO_SCMI_DIS"};
    } else {
        throw std::invalid_argument("unknown figure preset '" + figure + "' (expected fig4, fig5, fig6 or fig7)");
    }
    return s;
}

ResultRow evaluate_point(const std::string& bound, Family family, int n, int m, int k, double p, double mu, double sigma,
                         const McConfig& mc)
{
    ResultRow row;
    if (family == Family::Bernoulli) {
        row = evaluate_bernoulli(bound, n, m, k, p);
    } else if (family == Family::Gaussian) {
        GaussianInstance g{n, m, mu, sigma, GaussianLoss::Quadratic};
        g.validate();
        if (bound == "TRUE_GEN") row = make_row(bound, n, m, k, 2.0 * sigma * sigma / n, 0.0, Provenance::ClosedForm);
        else if (bound == "IMI_GAUSS") row = from_mc(gaussian_imi_closed(n, sigma));
        else if (bound == "IMI_GENERAL") row = from_mc(gaussian_imi_general(n, sigma, ImiCgf::SubGaussian, mc.lambda_range));
        else if (bound == "ICIMI_GENERAL") row = from_mc(general_bound_mc(GeneralKind::ICIMI_GENERAL, g, mc));
        else if (bound == "LOFO_GENERAL") row = from_mc(general_bound_mc(GeneralKind::LOFO_GENERAL, g, mc));
        else if (bound == "IPCIMI_GENERAL") row = from_mc(ipcimi_general_mc(g, k, mc));
        else throw std::invalid_argument("unknown Gaussian bound " + bound);
    } else {
        GaussianInstance g{n, m, mu, sigma, GaussianLoss::TruncatedQuadratic};
        g.validate();
        if (bound == "TRUE_GEN") row = make_row(bound, n, m, k, finite_w_true_gen(g), 0.0, Provenance::Quadrature);
        else if (bound == "IMI") row = from_mc(finite_w_bound(FiniteKind::IMI, g, mc));
        else if (bound == "ICIMI") row = from_mc(finite_w_bound(FiniteKind::ICIMI, g, mc));
        else if (bound == "LOO_CMI") row = from_mc(finite_w_bound(FiniteKind::LOO_CMI, g, mc));
        else if (bound == "LOFO_CMI") row = from_mc(finite_w_bound(FiniteKind::LOFO_CMI, g, mc));
        else throw std::invalid_argument("unknown finite-hypothesis bound " + bound);
    }
    row.param = param_string(family, p, mu, sigma);
    row.seed = mc.seed;
    return row;
}

SweepResult run_sweep(const SweepSpec& spec)
{
    struct Task {
        std::string bound;
        int n, m, k;
        double p;
    };
    std::vector<Task> tasks;
    const std::vector<double> ps = spec.family == Family::Bernoulli ? spec.p_grid : std::vector<double>{0.0};
    for (int n : spec.n_grid)
        for (double p : ps) {
            std::vector<int> ms = spec.m_grid;
            if (spec.m_half) ms = {n / 2};
            if (ms.empty()) ms = {1};
            for (int m : ms)
                for (int k : spec.k_grid)
                    for (const auto& b : spec.bounds) {
                        if (spec.m_half && n % 2 != 0) continue;
                        tasks.push_back({b, n, m, k, p});
                    }
        }

    std::vector<std::optional<ResultRow>> slots(tasks.size());
    std::vector<std::string> reasons(tasks.size());
    McConfig mc = spec.mc;
    mc.seed = spec.seed;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const auto& t = tasks[i];
            try {
                slots[i] = evaluate_point(t.bound, spec.family, t.n, t.m, t.k, t.p, spec.mu, spec.sigma, mc);
            } catch (const std::invalid_argument& e) {
                reasons[i] = t.bound + " at n=" + std::to_string(t.n) + ",m=" + std::to_string(t.m) + ",k=" + std::to_string(t.k) +
                             ": " + e.what();
            } catch (const std::domain_error& e) {
                reasons[i] = t.bound + " at n=" + std::to_string(t.n) + ",m=" + std::to_string(t.m) + ": " + e.what();
            }
        }
    };
    int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min<int>(threads, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
    std::vector<std::thread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    SweepResult out;
    std::set<std::tuple<std::string, int, int, int, std::string>> seen;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!slots[i]) {
            out.skipped.push_back(reasons[i]);
            continue;
        }
        const auto& r = *slots[i];
        if (!seen.insert({r.bound, r.n, r.m, r.k, r.param}).second) continue;  // kinds with a fixed m repeat across the m grid
        out.rows.push_back(r);
    }
    return out;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows)
{
    os << "bound,n,m,k,param,value,stderr,provenance,seed\n";
    for (const auto& r : rows)
        os << r.bound << ',' << r.n << ',' << r.m << ',' << r.k << ',' << r.param << ',' << format_number(r.value) << ','
           << format_number(r.std_error) << ',' << r.provenance << ',' << r.seed << '\n';
}

void write_csv(const std::string& path, const std::vector<ResultRow>& rows)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    write_csv(f, rows);
    if (!f) throw std::runtime_error("write failed for " + path);
}

// ---------------------------------------------------------------- checks

namespace {

using Clock = std::chrono::steady_clock;

CheckResult timed(const std::string& name, const std::function<void(CheckResult&)>& body)
{
    CheckResult r;
    r.name = name;
    const auto t0 = Clock::now();
    try {
        body(r);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return r;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

double bern_bound(const std::string& name, int n, int m, double p, int k = 1)
{
    return evaluate_bernoulli(name, n, m, k, p).value;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double c = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (c * sxy - sx * sy) / (c * sxx - sx * sx);
}

// Oracle query for the single-index quantity a closed-form kind represents; nullopt when inapplicable.
std::optional<double> oracle_value(InfoKind kind, const JointTable& t, const PartitionConfig& c, std::optional<int> z = std::nullopt)
{
    const int n = c.n(), m = c.m(), k = c.k();
    std::vector<std::int64_t> given;
    if (z) given = {*z};
    auto scmi = [&]() -> double {
        if (z) return info_query(t, {Var::w()}, {Var::u(0)}, {Var::z(0)}, given).value;
        return info_query(t, {Var::w()}, {Var::u(0)}, {Var::z(0)}).value;
    };
    switch (kind) {
    case InfoKind::MI_FULL: return info_query(t, {Var::w()}, {Var::z_train_all()}).value;
    case InfoKind::IMI: return info_query(t, {Var::w()}, {Var::z_train_at(0, 0)}).value;
    case InfoKind::IPMI_BLOCK: return info_query(t, {Var::w()}, {Var::z_train(0)}).value;
    case InfoKind::LOO_CMI: if (m == 1 && k == 1) return info_query(t, {Var::w()}, {Var::u_all()}, {Var::z_all()}).value; break;
    case InfoKind::ICIMI: if (m == n && k == n) return info_query(t, {Var::w()}, {Var::u(0)}, {Var::z_block(0)}).value; break;
    case InfoKind::LMO_CMI: if (k == 1) return info_query(t, {Var::w()}, {Var::u_all()}, {Var::z_all()}).value; break;
    case InfoKind::LOFO_CMI: if (k == m && n % m == 0) return info_query(t, {Var::w()}, {Var::u(0)}, {Var::z_block(0)}).value; break;
    case InfoKind::MN_IPCIMI: if (k == n && m % n == 0) return info_query(t, {Var::w()}, {Var::u(0)}, {Var::z_block(0)}).value; break;
    case InfoKind::SICIMI: if (m == n) return scmi(); break;
    case InfoKind::LOO_SCMI: if (m == 1) return scmi(); break;
    case InfoKind::LMO_SCMI: return scmi();
    }
    return std::nullopt;
}

CheckResult check_oracle_equivalence()
{
    return timed("1 oracle equivalence of closed forms", [](CheckResult& r) {
        r.tolerance = 1e-9;
        int count = 0;
        for (int n = 1; n <= 3; ++n)
            for (int m = 1; m <= 3; ++m)
                for (int k : divisor_set(n, m))
                    for (double p : {0.2, 0.5, 0.8}) {
                        const PartitionConfig c(n, m, k);
                        const JointTable t(TinyInstance{c, p, Algorithm::AverageErm, Loss::Quadratic});
                        for (InfoKind kind : all_info_kinds()) {
                            const auto ov = oracle_value(kind, t, c);
                            if (!ov) continue;
                            BernoulliInstance bi{n, m, k, p};
                            if (kind == InfoKind::MI_FULL || kind == InfoKind::IMI) bi = {n, 0, 0, p};
                            if (kind == InfoKind::LMO_SCMI || kind == InfoKind::SICIMI || kind == InfoKind::LOO_SCMI) bi.k = 0;
                            const double dev = std::abs(info_quantity(kind, bi).value - *ov);
                            ++count;
                            if (dev > r.measured) {
                                r.measured = dev;
                                r.detail = "worst " + to_string(kind) + fmt(" at n=%g m=%g k=%g p=%g", n, m, k, p);
                            }
                            if (kind == InfoKind::LMO_SCMI || kind == InfoKind::SICIMI || kind == InfoKind::LOO_SCMI)
                                for (int z = 0; z < 2; ++z) {
                                    const double d2 = std::abs(dis_info_quantity(kind, bi, z).value - *oracle_value(kind, t, c, z));
                                    ++count;
                                    if (d2 > r.measured) {
                                        r.measured = d2;
                                        r.detail = "worst " + to_string(kind) + "|z" + fmt(" at n=%g m=%g k=%g p=%g", n, m, k, p);
                                    }
                                }
                        }
                    }
        r.passed = r.measured <= r.tolerance;
        r.detail += "; " + std::to_string(count) + " comparisons";
    });
}

// (mean - target) / stderr of the cross-validation error under the Bernoulli or Gaussian ERM.
double cv_error_zscore(const PartitionConfig& cfg, bool gaussian, double param, int draws, std::uint64_t seed, double& mean)
{
    Rng rng = make_rng(seed, 77);
    std::bernoulli_distribution bern(gaussian ? 0.5 : param);
    std::normal_distribution<double> gauss(0.0, gaussian ? param : 1.0);
    const int total = cfg.n() + cfg.m();
    std::vector<double> z(total);
    LossTable losses(cfg);
    RunningStats st;
    for (int d = 0; d < draws; ++d) {
        for (auto& x : z) x = gaussian ? gauss(rng) : (bern(rng) ? 1.0 : 0.0);
        const auto draw = sample_membership(cfg, rng);
        double w = 0.0;
        for (int i = 0; i < cfg.k(); ++i)
            for (int j : draw.subsets[i]) w += z[cfg.global_index(i, j)];
        w /= cfg.n();
        for (int i = 0; i < cfg.k(); ++i)
            for (int j = 0; j < cfg.block_size(); ++j) {
                const double e = w - z[cfg.global_index(i, j)];
                losses.at(i, j) = e * e;
            }
        st.add(cv_error(losses, draw, cfg).value);
    }
    mean = st.mean;
    const double target = gaussian ? 2.0 * param * param / cfg.n() : true_gen_error(cfg.n(), param);
    return (st.mean - target) / st.stderr_of_mean();
}

CheckResult check_true_gen(std::uint64_t seed)
{
    return timed("2 true generalization error via cv_error", [seed](CheckResult& r) {
        r.tolerance = 3.0;
        double mb = 0, mg = 0;
        const double zb = cv_error_zscore(PartitionConfig(10, 5, 5), false, 0.4, 100000, seed, mb);
        const double zg = cv_error_zscore(PartitionConfig(10, 5, 5), true, 1.0, 100000, seed + 1, mg);
        r.measured = std::max(std::abs(zb), std::abs(zg));
        r.passed = r.measured <= r.tolerance;
        r.detail = fmt("Bernoulli mean %.6f (target 0.048, z=%.2f); Gaussian mean %.6f (target 0.2, z=%.2f)", mb, zb, mg, zg);
    });
}

CheckResult check_loo_constant()
{
    return timed("3 LOO-CMI bound tends to sqrt(H(p)/2)", [](CheckResult& r) {
        r.tolerance = 0.02;
        const double target = std::sqrt(binary_entropy(0.4) / 2.0);
        for (int n : {1000, 2000, 5000, 10000}) r.measured = std::max(r.measured, std::abs(bern_bound("LOO_CMI", n, 1, 0.4) - target));
        r.passed = r.measured <= r.tolerance;
        r.detail = fmt("target %.6f, bound at n=10000 %.6f", target, bern_bound("LOO_CMI", 10000, 1, 0.4));
    });
}

CheckResult check_decay_slopes()
{
    return timed("4 IMI / ICIMI decay slopes", [](CheckResult& r) {
        std::vector<double> ns, imi, icimi;
        for (int n = 10; n <= 1000; n += 10) {
            ns.push_back(n);
            imi.push_back(bern_bound("IMI", n, 0, 0.4));
            icimi.push_back(bern_bound("ICIMI", n, n, 0.4));
        }
        const double s1 = loglog_slope(ns, imi), s2 = loglog_slope(ns, icimi);
        r.tolerance = 0.05;
        r.measured = std::max(std::abs(s1 + 0.5), std::abs(s2 + 0.5));
        r.passed = r.measured <= r.tolerance;
        r.detail = fmt("IMI slope %.4f, ICIMI slope %.4f (allowed [-0.55, -0.45])", s1, s2);
    });
}

CheckResult check_fig4()
{
    return timed("5 LmO-CMI / (m,n)-IPCIMI converge to MI / IMI", [](CheckResult& r) {
        r.tolerance = 0.02;
        const int n = 10;
        const double p = 0.4;
        const double mi = bern_bound("MI", n, 0, p), imi = bern_bound("IMI", n, 0, p);
        std::vector<double> lmo, mn;
        for (int m : {100, 1000, 10000}) {
            lmo.push_back(bern_bound("LMO_CMI", n, m, p));
            mn.push_back(bern_bound("MN_IPCIMI", n, m, p));
        }
        r.measured = std::max(std::abs(lmo.back() - mi), std::abs(mn.back() - imi));
        const bool mono = lmo[0] >= lmo[1] && lmo[1] >= lmo[2] && mn[0] >= mn[1] && mn[1] >= mn[2];
        r.passed = r.measured <= r.tolerance && mono;
        r.detail = fmt("LmO-CMI %.5f vs MI %.5f; (m,n)-IPCIMI %.5f vs IMI %.5f", lmo.back(), mi, mn.back(), imi) +
                   (mono ? "; monotone" : "; NOT monotone") +
                   fmt(" (LmO %.5f %.5f %.5f,", lmo[0], lmo[1], lmo[2]) + fmt(" mn %.5f %.5f %.5f)", mn[0], mn[1], mn[2]);
    });
}

CheckResult check_fig5(const McConfig& mc)
{
    return timed("6 Gaussian general LOFO below ICIMI and IMI", [&mc](CheckResult& r) {
        r.tolerance = 2.0;
        r.measured = kInf;
        std::ostringstream det;
        for (int n : {10, 20, 40}) {
            const GaussianInstance g{n, n / 2, 0.0, 1.0, GaussianLoss::Quadratic};
            const auto lofo = general_bound_mc(GeneralKind::LOFO_GENERAL, g, mc);
            const auto icimi = general_bound_mc(GeneralKind::ICIMI_GENERAL, g, mc);
            const double imi = gaussian_imi_closed(n, 1.0).value;
            const double z1 = (icimi.value - lofo.value) / std::hypot(icimi.std_error, lofo.std_error);
            const double z2 = (imi - lofo.value) / lofo.std_error;
            r.measured = std::min({r.measured, z1, z2});
            det << fmt("n=%g: LOFO %.4f(%.4f) ICIMI %.4f", n, lofo.value, lofo.std_error, icimi.value)
                << fmt("(%.4f) IMI %.4f; ", icimi.std_error, imi);
        }
        r.passed = r.measured > r.tolerance;
        r.detail = det.str() + "min margin in combined standard errors " + format_number(r.measured);
    });
}

CheckResult check_fig6(const McConfig& mc)
{
    return timed("7 finite-hypothesis LOFO-CMI below IMI, ICIMI, LOO-CMI", [&mc](CheckResult& r) {
        r.tolerance = 2.0;
        r.measured = kInf;
        std::ostringstream det;
        for (int n : {10, 20, 40}) {
            const GaussianInstance g{n, 2, 1.0, 0.5, GaussianLoss::TruncatedQuadratic};
            const auto lofo = finite_w_bound(FiniteKind::LOFO_CMI, g, mc);
            det << "n=" << n << ": LOFO " << format_number(lofo.value);
            for (auto kind : {FiniteKind::IMI, FiniteKind::ICIMI, FiniteKind::LOO_CMI}) {
                const auto other = finite_w_bound(kind, g, mc);
                const double se = std::hypot(other.std_error, lofo.std_error);
                r.measured = std::min(r.measured, (other.value - lofo.value) / se);
                det << " " << to_string(kind) << " " << format_number(other.value);
            }
            det << "; ";
        }
        r.passed = r.measured > r.tolerance;
        r.detail = det.str() + "min margin in combined standard errors " + format_number(r.measured);
    });
}

CheckResult check_fig7()
{
    return timed("8 disintegrated LmO-SCMI improves with m and beats SICIMI", [](CheckResult& r) {
        const int n = 10;
        const double p = 0.25;
        std::vector<double> v;
        for (int m : {100, 1000, 10000}) v.push_back(bern_bound("LMO_SCMI_DIS", n, m, p));
        const double sicimi = bern_bound("SICIMI_DIS", n, n, p);
        const bool mono = v[0] >= v[1] && v[1] >= v[2];
        r.measured = sicimi - v[2];
        r.passed = mono && r.measured > 0.0;
        r.detail = fmt("LmO-SCMI %.5f %.5f %.5f; SICIMI %.5f", v[0], v[1], v[2], sicimi) + (mono ? "" : "; NOT monotone");
    });
}

CheckResult check_cgf_bound(std::uint64_t seed)
{
    return timed("9 exact CGF below the bounded-difference CGF bound", [seed](CheckResult& r) {
        Rng rng = make_rng(seed, 9);
        std::uniform_int_distribution<int> nm(1, 3);
        std::uniform_real_distribution<double> pu(0.05, 0.95);
        r.measured = -kInf;
        std::ostringstream det;
        for (int inst = 0; inst < 10; ++inst) {
            const int n = nm(rng), m = nm(rng);
            const auto ks = divisor_set(n, m);
            const int k = ks[std::uniform_int_distribution<std::size_t>(0, ks.size() - 1)(rng)];
            const double p = pu(rng);
            const bool majority = inst % 2 == 1;
            const TinyInstance ti{PartitionConfig(n, m, k), p, majority ? Algorithm::MajorityVote : Algorithm::AverageErm,
                                  majority ? Loss::ZeroOne : Loss::Quadratic};
            const JointTable t(ti);
            const double delta = loss_delta(t);
            const double scale = delta * delta * coefficient_C(ti.cfg) * k * (n + m) / (8.0 * n * m);
            for (int g = 0; g <= 40; ++g) {
                const double lam = -5.0 + 0.25 * g;
                const double gap = exact_cgf(t, 0, lam).worst - lam * lam * scale;
                r.measured = std::max(r.measured, gap);
            }
            det << "(" << n << "," << m << "," << k << ") ";
        }
        r.tolerance = 1e-12;
        r.passed = r.measured <= r.tolerance;
        r.detail = "instances " + det.str() + "max(CGF - bound) " + format_number(r.measured);
    });
}

CheckResult check_zero_one_equality()
{
    return timed("10 0-1 loss JS equality, indicator/membership and k-invariance", [](CheckResult& r) {
        r.tolerance = 1e-9;
        int count = 0;
        for (auto [n, m] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {3, 1}, {1, 2}, {2, 2}, {3, 3}, {2, 4}, {4, 2}})
            for (int k : divisor_set(n, m))
                for (double p : {0.0, 0.3, 0.5, 0.8}) {
                    const auto rep = zero_one_equality_check(TinyInstance{PartitionConfig(n, m, k), p, Algorithm::MajorityVote, Loss::ZeroOne});
                    ++count;
                    const double dev = std::max({std::abs(rep.djs - rep.rhs), rep.indicator_dev, rep.k_invariance_dev, rep.bac_dev});
                    if (dev >= r.measured) {
                        r.measured = dev;
                        r.detail = fmt("worst at n=%g m=%g k=%g p=%g", n, m, k, p);
                    }
                    if (!rep.ok()) r.detail = rep.failures.front();
                }
        r.passed = r.measured <= r.tolerance;
        r.detail += "; " + std::to_string(count) + " instances";
    });
}

CheckResult check_divergences(std::uint64_t seed)
{
    return timed("11 divergence toolkit properties", [seed](CheckResult& r) {
        Rng rng = make_rng(seed, 11);
        std::uniform_real_distribution<double> u(0.0, 1.0), inner(0.01, 0.99);
        double sup_dev = 0.0, floor_viol = 0.0, inv_dev = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double p = inner(rng), q = inner(rng);
            sup_dev = std::max(sup_dev, std::abs(d_gamma_sup(p, q) - d_kl_binary(p, q)));
        }
        for (int i = 0; i < 10000; ++i) {
            const double th = std::clamp(u(rng), 1e-6, 1.0 - 1e-6), p = u(rng), q = u(rng);
            floor_viol = std::max(floor_viol, 2.0 * th * (1.0 - th) * (p - q) * (p - q) - d_js(th, p, q));
        }
        for (int i = 0; i < 2000; ++i) {
            const double th = std::clamp(u(rng), 1e-3, 1.0 - 1e-3), p = u(rng);
            const double q = p + (1.0 - p) * u(rng);
            const double back = d_js_inverse(th, p, d_js(th, p, q), 1e-14);
            inv_dev = std::max(inv_dev, std::abs(back - q));
        }
        r.measured = sup_dev;
        r.tolerance = 1e-4;
        r.passed = sup_dev <= 1e-4 && floor_viol <= 1e-15 && inv_dev <= 1e-9;
        r.detail = fmt("sup d_gamma vs d_KL %.2e; JS floor violation %.2e; inverse round trip %.2e", sup_dev, floor_viol, inv_dev);
    });
}

CheckResult check_gaussian_imi()
{
    return timed("12 lambda-optimized Gaussian IMI matches the closed form", [](CheckResult& r) {
        r.tolerance = 1e-3;
        for (int n : {2, 10, 100}) {
            const double a = gaussian_imi_general(n, 1.0).value, b = gaussian_imi_closed(n, 1.0).value;
            r.measured = std::max(r.measured, std::abs(a - b) / b);
        }
        r.passed = r.measured <= r.tolerance;
        r.detail = "max relative deviation " + format_number(r.measured);
    });
}

// ---- additional invariants for verify

std::vector<CheckResult> extra_checks(std::uint64_t seed)
{
    std::vector<CheckResult> out;
    out.push_back(timed("cv symmetry and averaged-loss identity", [seed](CheckResult& r) {
        Rng rng = make_rng(seed, 21);
        std::uniform_real_distribution<double> u(0.0, 3.0);
        for (auto [n, m, k] : std::vector<std::tuple<int, int, int>>{{1, 1, 1}, {2, 1, 1}, {6, 4, 2}, {3, 3, 3}, {4, 2, 2}}) {
            const PartitionConfig c(n, m, k);
            LossTable l(c);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < c.block_size(); ++j) l.at(i, j) = u(rng);
            const auto subs = enumerate_subsets(c.block_size(), c.train_per_block());
            for (int i = 0; i < k; ++i) {
                double eps = 0.0, avg = 0.0, all = 0.0;
                for (const auto& s : subs) {
                    eps += block_cv_error(l, i, s, c);
                    double tr = 0.0;
                    for (int j : s) tr += l.at(i, j);
                    avg += static_cast<double>(k) / n * tr;
                }
                for (int j = 0; j < c.block_size(); ++j) all += l.at(i, j);
                r.measured = std::max({r.measured, std::abs(eps / subs.size()),
                                       std::abs(avg / subs.size() - static_cast<double>(k) / (n + m) * all)});
            }
        }
        r.tolerance = 1e-12;
        r.passed = r.measured <= r.tolerance;
    }));
    out.push_back(timed("exact unbiasedness of cv_error on the table", [](CheckResult& r) {
        for (auto [n, m, k] : std::vector<std::tuple<int, int, int>>{{1, 1, 1}, {2, 2, 1}, {2, 2, 2}, {3, 1, 1}, {3, 3, 3}})
            for (double p : {0.2, 0.5, 0.7}) {
                const JointTable t(TinyInstance{PartitionConfig(n, m, k), p});
                r.measured = std::max({r.measured, std::abs(expected_cv_error(t) - true_gen_error(n, p)), std::abs(t.total_weight() - 1.0)});
            }
        r.tolerance = 1e-12;
        r.passed = r.measured <= r.tolerance;
    }));
    out.push_back(timed("chain rule I(W;U|Zblock) = I(W;Ztrain) - I(W;Zblock)", [](CheckResult& r) {
        for (auto [n, m, k] : std::vector<std::tuple<int, int, int>>{{2, 2, 1}, {2, 2, 2}, {3, 3, 3}, {3, 1, 1}, {2, 4, 2}})
            for (auto alg : {Algorithm::AverageErm, Algorithm::MajorityVote}) {
                const JointTable t(TinyInstance{PartitionConfig(n, m, k), 0.35, alg, Loss::ZeroOne});
                const double lhs = info_query(t, {Var::w()}, {Var::u(0)}, {Var::z_block(0)}).value;
                const double rhs = info_query(t, {Var::w()}, {Var::z_train(0)}).value - info_query(t, {Var::w()}, {Var::z_block(0)}).value;
                r.measured = std::max(r.measured, std::abs(lhs - rhs));
            }
        r.tolerance = 1e-9;
        r.passed = r.measured <= r.tolerance;
    }));
    out.push_back(timed("data processing: indicator information below membership information", [](CheckResult& r) {
        r.measured = -kInf;
        for (auto [n, m, k] : std::vector<std::tuple<int, int, int>>{{2, 2, 1}, {3, 3, 3}, {2, 1, 1}, {4, 2, 2}})
            for (double p : {0.3, 0.6}) {
                const JointTable t(TinyInstance{PartitionConfig(n, m, k), p});
                const double a = info_query(t, {Var::w()}, {Var::t(0, 0)}, {Var::z(0)}).value;
                const double b = info_query(t, {Var::w()}, {Var::u(0)}, {Var::z(0)}).value;
                r.measured = std::max(r.measured, a - b);
            }
        r.tolerance = 1e-12;
        r.passed = r.measured <= r.tolerance;
    }));
    out.push_back(timed("dual representation of the population risk", [](CheckResult& r) {
        for (int n : {1, 2, 3, 4})
            for (double p : {0.2, 0.3, 0.5}) {
                const auto d = dual_representation_check(n, p);
                if (d.applicable) r.measured = std::max(r.measured, std::abs(d.loo_form - d.std_form));
            }
        r.tolerance = 1e-9;
        r.passed = r.measured <= r.tolerance;
    }));
    out.push_back(timed("single-mode JS inversion recovers the population risk", [](CheckResult& r) {
        for (auto [n, m, k] : std::vector<std::tuple<int, int, int>>{{3, 1, 1}, {2, 2, 2}, {3, 3, 1}})
            for (double p : {0.3, 0.5}) {
                const TinyInstance ti{PartitionConfig(n, m, k), p, Algorithm::MajorityVote, Loss::ZeroOne};
                const JointTable t(ti);
                const auto risks = exact_risks(t);
                if (risks.empirical > risks.population) continue;
                double s = 0.0;
                for (int i = 0; i < k; ++i)
                    for (int j = 0; j < ti.cfg.block_size(); ++j) s += info_query(t, {Var::loss(i, j)}, {Var::u(i)}).value;
                const double v = d_js_inverse(training_prob(ti.cfg).value(), std::clamp(risks.empirical, 0.0, 1.0), s / (n + m), 1e-14);
                r.measured = std::max(r.measured, std::abs(v - risks.population));
            }
        r.tolerance = 1e-9;
        r.passed = r.measured <= r.tolerance;
    }));
    out.push_back(timed("LmO-CMI at m=1 equals LOO-CMI", [](CheckResult& r) {
        for (int n : {1, 2, 5, 10, 50})
            for (double p : {0.1, 0.4, 0.9})
                r.measured = std::max(r.measured, std::abs(info_quantity(InfoKind::LMO_CMI, {n, 1, 1, p}).value -
                                                           info_quantity(InfoKind::LOO_CMI, {n, 1, 1, p}).value));
        r.tolerance = 1e-10;
        r.passed = r.measured <= r.tolerance;
    }));
    out.push_back(timed("Bernoulli bounds are upper bounds", [](CheckResult& r) {
        r.measured = -kInf;
        for (int n : {1, 2, 5, 10, 40})
            for (double p : {0.1, 0.25, 0.4, 0.5})
                for (const char* b : {"MI", "IMI", "ICIMI", "LOO_CMI", "SICIMI", "LOO_SCMI", "SICIMI_DIS", "LOO_SCMI_DIS"}) {
                    const double v = bern_bound(b, n, n, p);
                    r.measured = std::max(r.measured, true_gen_error(n, p) - v);
                }
        for (int m : {1, 2, 10, 100})
            for (const char* b : {"LMO_CMI", "MN_IPCIMI", "LMO_SCMI", "LMO_SCMI_DIS"}) {
                const double v = bern_bound(b, 10, m * 10, 0.4);
                r.measured = std::max(r.measured, true_gen_error(10, 0.4) - v);
            }
        r.tolerance = 0.0;
        r.passed = r.measured <= r.tolerance;
    }));
    out.push_back(timed("LOO-CMI bound slope is flat", [](CheckResult& r) {
        std::vector<double> ns, v;
        for (int n = 100; n <= 1000; n += 100) { ns.push_back(n); v.push_back(bern_bound("LOO_CMI", n, 1, 0.4)); }
        r.measured = std::abs(loglog_slope(ns, v));
        r.tolerance = 0.05;
        r.passed = r.measured <= r.tolerance;
    }));
    out.push_back(timed("coefficient C examples", [](CheckResult& r) {
        r.measured = std::max({std::abs(coefficient_C(PartitionConfig(5, 1, 1)) - 1.2), std::abs(coefficient_C(PartitionConfig(6, 4, 2)) - 1.875),
                               std::abs(coefficient_C(PartitionConfig(8, 8, 4)) - 8.0 / 3.0)});
        r.tolerance = 1e-12;
        r.passed = r.measured <= r.tolerance;
    }));
    return out;
}

} // namespace

std::vector<CheckResult> acceptance_checks(std::uint64_t seed, std::optional<McConfig> mc)
{
    McConfig cfg = mc.value_or(McConfig{});
    cfg.seed = seed;
    return {check_oracle_equivalence(), check_true_gen(seed), check_loo_constant(), check_decay_slopes(),
            check_fig4(), check_fig5(cfg), check_fig6(cfg), check_fig7(),
            check_cgf_bound(seed), check_zero_one_equality(), check_divergences(seed), check_gaussian_imi()};
}

std::vector<CheckResult> run_verify(VerifyLevel level, std::uint64_t seed, std::optional<McConfig> mc)
{
    std::vector<CheckResult> out;
    if (level == VerifyLevel::Full) {
        out = acceptance_checks(seed, mc);
    } else {
        out = {check_oracle_equivalence(), check_true_gen(seed), check_loo_constant(), check_decay_slopes(), check_fig7(),
               check_cgf_bound(seed), check_zero_one_equality(), check_divergences(seed), check_gaussian_imi()};
    }
    for (auto& c : extra_checks(seed)) out.push_back(std::move(c));
    return out;
}

void print_report(std::ostream& os, const std::vector<CheckResult>& checks)
{
    for (const auto& c : checks) {
        char buf[512];
        std::snprintf(buf, sizeof buf, "[%s] %s  measured=%s tol=%s  (%.2fs)", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                      format_number(c.measured).c_str(), format_number(c.tolerance).c_str(), c.seconds);
        os << buf;
        if (!c.detail.empty()) os << "  " << c.detail;
        os << '\n';
    }
}

} // namespace lmo
