#include "lmo/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

struct Common {
    std::uint64_t seed = 1;
    std::string out;
    int mc_outer = 0;
    int mc_inner = 0;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--seed", c.seed, "Base RNG seed");
    app->add_option("--out", c.out, "Output path (default: stdout)");
    app->add_option("--mc-outer", c.mc_outer, "Outer Monte-Carlo draws")->check(CLI::PositiveNumber);
    app->add_option("--mc-inner", c.mc_inner, "Inner Monte-Carlo draws")->check(CLI::PositiveNumber);
}

lmo::McConfig mc_from(const Common& c)
{
    lmo::McConfig mc;
    mc.seed = c.seed;
    if (c.mc_outer > 0) mc.outer_samples = c.mc_outer;
    if (c.mc_inner > 0) mc.inner_samples = c.mc_inner;
    return mc;
}

const std::map<std::string, lmo::Family> kFamilies = {
    {"bernoulli", lmo::Family::Bernoulli}, {"gaussian", lmo::Family::Gaussian}, {"finite", lmo::Family::GaussianFiniteW}};

void emit_rows(const Common& c, const std::vector<lmo::ResultRow>& rows)
{
    if (c.out.empty()) lmo::write_csv(std::cout, rows);
    else lmo::write_csv(c.out, rows);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Leave-m-out generalization bounds: sweeps, single evaluations and verification"};
    app.require_subcommand(1);

    Common sweep_c, verify_c, bound_c;

    auto* sweep = app.add_subcommand("sweep", "Run a figure preset or a custom grid and write CSV");
    add_common(sweep, sweep_c);
    std::string figure;
    std::string family_name = "bernoulli";
    std::vector<int> n_grid, m_grid, k_grid;
    std::vector<double> p_grid;
    std::vector<std::string> bounds;
    double mu = 0.0, sigma = 1.0;
    bool has_bounds = false;
    int threads = 0;
    sweep->add_option("--figure", figure, "Preset: fig4, fig5, fig6, fig7")->check(CLI::IsMember({"fig4", "fig5", "fig6", "fig7"}));
    sweep->add_option("--family", family_name, "bernoulli, gaussian or finite")->check(CLI::IsMember({"bernoulli", "gaussian", "finite"}));
    sweep->add_option("--n", n_grid, "n grid")->delimiter(',');
    sweep->add_option("--m", m_grid, "m grid")->delimiter(',');
    sweep->add_option("--k", k_grid, "k grid (IPMI, IPCIMI_GENERAL)")->delimiter(',');
    sweep->add_option("--p", p_grid, "p grid (Bernoulli)")->delimiter(',');
    sweep->add_option("--mu", mu, "Gaussian mean");
    sweep->add_option("--sigma", sigma, "Gaussian standard deviation")->check(CLI::PositiveNumber);
    auto* bounds_opt = sweep->add_option("--bounds", bounds, "Bound names")->delimiter(',');
    sweep->add_option("--threads", threads, "Worker threads (0: all cores)");

    auto* verify = app.add_subcommand("verify", "Run the verification suite");
    add_common(verify, verify_c);
    std::string level = "fast";
    verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));

    auto* bound = app.add_subcommand("bound", "Evaluate one bound at one point");
    add_common(bound, bound_c);
    std::string kind, bfamily = "bernoulli";
    int bn = 10, bm = 1, bk = 1;
    double bp = 0.4, bmu = 0.0, bsigma = 1.0;
    bound->add_option("--kind", kind, "Bound name, e.g. LMO_CMI, SICIMI_DIS, LOFO_GENERAL")->required();
    bound->add_option("--family", bfamily, "bernoulli, gaussian or finite")->check(CLI::IsMember({"bernoulli", "gaussian", "finite"}));
    bound->add_option("--n", bn, "n")->check(CLI::PositiveNumber);
    bound->add_option("--m", bm, "m")->check(CLI::PositiveNumber);
    bound->add_option("--k", bk, "k")->check(CLI::PositiveNumber);
    bound->add_option("--p", bp, "Bernoulli parameter")->check(CLI::Range(0.0, 1.0));
    bound->add_option("--mu", bmu, "Gaussian mean");
    bound->add_option("--sigma", bsigma, "Gaussian standard deviation")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*sweep) {
            has_bounds = bounds_opt->count() > 0;
            lmo::SweepSpec spec;
            if (!figure.empty()) spec = lmo::preset(figure);
            else spec.family = kFamilies.at(family_name);
            if (!n_grid.empty()) spec.n_grid = n_grid;
            if (!m_grid.empty()) { spec.m_grid = m_grid; spec.m_half = false; }
            if (!k_grid.empty()) spec.k_grid = k_grid;
            if (!p_grid.empty()) spec.p_grid = p_grid;
            if (sweep->count("--mu")) spec.mu = mu;
            if (sweep->count("--sigma")) spec.sigma = sigma;
            if (has_bounds) spec.bounds = bounds;
            if (spec.family == lmo::Family::Bernoulli && spec.p_grid.empty()) spec.p_grid = {0.4};
            if (spec.n_grid.empty()) throw std::invalid_argument("sweep: --n is required without --figure");
            spec.mc = mc_from(sweep_c);
            spec.seed = sweep_c.seed;
            spec.threads = threads;
            const auto res = lmo::run_sweep(spec);
            for (const auto& s : res.skipped) std::cerr << "skipped: " << s << '\n';
            emit_rows(sweep_c, res.rows);
            return 0;
        }
        if (*bound) {
            const auto mc = mc_from(bound_c);
            const auto row = lmo::evaluate_point(kind, kFamilies.at(bfamily), bn, bm, bk, bp, bmu, bsigma, mc);
            emit_rows(bound_c, {row});
            return 0;
        }
        if (*verify) {
            std::optional<lmo::McConfig> mc;
            if (verify_c.mc_outer > 0 || verify_c.mc_inner > 0) mc = mc_from(verify_c);
            const auto checks = lmo::run_verify(level == "full" ? lmo::VerifyLevel::Full : lmo::VerifyLevel::Fast, verify_c.seed, mc);
            if (verify_c.out.empty()) {
                lmo::print_report(std::cout, checks);
            } else {
                std::ofstream f(verify_c.out);
                if (!f) throw std::runtime_error("cannot open " + verify_c.out + " for writing");
                lmo::print_report(f, checks);
            }
            bool ok = true;
            for (const auto& c : checks) ok = ok && c.passed;
            return ok ? 0 : 1;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
