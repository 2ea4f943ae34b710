#ifndef QDMOO_CHECKS_HPP
#define QDMOO_CHECKS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qdmoo/oracle.hpp"

namespace qdmoo {

/// Test-fixture fault injection for the check suites; SsomSign flips the
/// sign of the SSoM weight matrix before gradient composition so the
/// gradients suite must fail.
enum class FaultInjection { None, SsomSign };

struct CheckItem {
    std::string name;
    double observed = 0.0; ///< max relative error or violation count
    double threshold = 0.0;
    bool pass = false;
};

struct CheckReport {
    std::string suite;
    std::vector<CheckItem> items;
    double elapsed_s = 0.0;

    bool ok() const;
    std::string to_json() const;
};

/// Finite-difference certification of every analytic gradient: v~_m,
/// SoM/TCH-Set/SSoM/STCH-Set compositions through the full problem chain,
/// and SQUAD, on the toy sphere and on LP with n = 32, 20 random points
/// each at relative error <= 1e-4.
CheckReport run_gradient_checks(std::uint64_t seed, FaultInjection fault = FaultInjection::None);

/// Closed-form metric checks: Vendi degenerate and 2x2 cases, the QVS
/// negative-mean floor, and the soft QD quadrature comparison.
CheckReport run_metric_checks(std::uint64_t seed);

/// theorem_suite wrapped as a CheckReport.
CheckReport run_theorem_checks(std::uint64_t seed, int trials, TheoremReport* full = nullptr);

} // namespace qdmoo

#endif
