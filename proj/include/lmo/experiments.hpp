#pragma once

#include "lmo/gaussian_mc.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lmo {

enum class Family { Bernoulli, Gaussian, GaussianFiniteW };

struct ResultRow {
    std::string bound;
    int n = 0, m = 0, k = 0;
    std::string param;  // "p=0.4" or "mu=0;sigma=1"
    double value = 0.0;
    double std_error = 0.0;
    std::string provenance;
    std::uint64_t seed = 0;
};

struct SweepSpec {
    std::string figure = "custom";  // fig4..fig7 or custom
    Family family = Family::Bernoulli;
    std::vector<int> n_grid;
    std::vector<int> m_grid;       // empty: m derived per bound (m = n/2 when m_half is set)
    bool m_half = false;
    std::vector<int> k_grid{1};    // used by IPMI only
    std::vector<double> p_grid;
    double mu = 0.0;
    double sigma = 1.0;
    std::vector<std::string> bounds;
    McConfig mc{};
    std::uint64_t seed = 1;
    int threads = 0;  // 0: hardware concurrency
};

struct SweepResult {
    std::vector<ResultRow> rows;
    std::vector<std::string> skipped;  // "<bound> at <point>: <reason>"
};

SweepSpec preset(const std::string& figure);

// One (bound, grid point) evaluation; throws std::invalid_argument when the point is unsatisfiable.
ResultRow evaluate_point(const std::string& bound, Family family, int n, int m, int k, double p, double mu, double sigma,
                         const McConfig& mc);

SweepResult run_sweep(const SweepSpec& spec);

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
void write_csv(const std::string& path, const std::vector<ResultRow>& rows);
std::string format_number(double v);

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;   // worst observed deviation or margin
    double tolerance = 0.0;
    std::string detail;
    double seconds = 0.0;
};

enum class VerifyLevel { Fast, Full };

std::vector<CheckResult> run_verify(VerifyLevel level, std::uint64_t seed = 1, std::optional<McConfig> mc = std::nullopt);

// The twelve acceptance criteria, in order.
std::vector<CheckResult> acceptance_checks(std::uint64_t seed = 1, std::optional<McConfig> mc = std::nullopt);

void print_report(std::ostream& os, const std::vector<CheckResult>& checks);

} // namespace lmo
