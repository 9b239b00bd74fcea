#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "driftlab/config.hpp"

namespace driftlab::checks {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Test seam: individual primitives can be swapped to verify that the suite
// actually catches a broken implementation.
struct CheckOverrides {
    std::function<double(double, double)> lambda_weight;  // (t, beta)
};

std::vector<CheckResult> run_all_checks(const ExperimentConfig& cfg,
                                        const CheckOverrides* overrides = nullptr);

// Prints one PASS/FAIL line per check; returns true iff all pass.
bool run_checks(std::ostream& out, const ExperimentConfig& cfg,
                const CheckOverrides* overrides = nullptr);

}  // namespace driftlab::checks
