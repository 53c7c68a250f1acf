// Acceptance gate: one line per criterion, nonzero exit if any fails.
#include "lmo/experiments.hpp"

#include <iostream>

int main()
{
    const auto checks = lmo::acceptance_checks(1);
    lmo::print_report(std::cout, checks);
    int failed = 0;
    for (const auto& c : checks) failed += c.passed ? 0 : 1;
    std::cout << (checks.size() - failed) << "/" << checks.size() << " acceptance criteria passed\n";
    return failed == 0 ? 0 : 1;
}
