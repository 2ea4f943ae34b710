#ifndef QDMOO_ORACLE_HPP
#define QDMOO_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qdmoo/common.hpp"

namespace qdmoo {

enum class DomRelation { StrictlyDominates, Dominates, Equal, Incomparable };

std::string dom_relation_name(DomRelation r);

/// Outcome of comparing two objective vectors. witness holds the strictly
/// better indices for (strict) dominance, or for Incomparable one index
/// where a wins and one where b wins.
struct DominanceVerdict {
    DomRelation relation = DomRelation::Incomparable;
    std::vector<int> witness;

    bool dominates() const
    {
        return relation == DomRelation::Dominates || relation == DomRelation::StrictlyDominates;
    }
};

/// Minimization convention: a dominates b iff a <= b everywhere and a < b
/// somewhere; strictly iff a < b everywhere.
DominanceVerdict dominance(const Eigen::Ref<const Eigen::VectorXd>& va,
                           const Eigen::Ref<const Eigen::VectorXd>& vb);

/// Central finite differences, (fn(x + h e_i) - fn(x - h e_i)) / 2h.
/// Throws EvalError on non-finite fn values.
Eigen::VectorXd finite_diff_gradient(const std::function<double(const Eigen::VectorXd&)>& fn,
                                     const Eigen::Ref<const Eigen::VectorXd>& x, double h);

struct ParetoCheckEntry {
    bool dominated = false;
    int witness = -1; ///< pool row index of a dominating point
};

using ObjectiveEvaluator = std::function<Eigen::VectorXd(const Eigen::Ref<const Eigen::VectorXd>&)>;

/// Exact pairwise dominance scan of each candidate against a finite pool
/// (desk-scale surrogate for Pareto optimality).
std::vector<ParetoCheckEntry> pareto_check(const Eigen::Ref<const Eigen::MatrixXd>& candidates,
                                           const Eigen::Ref<const Eigen::MatrixXd>& pool,
                                           const ObjectiveEvaluator& evaluator);

/// Same scan on precomputed objective values (rows = points, cols =
/// objectives).
std::vector<ParetoCheckEntry> pareto_check_values(const Eigen::Ref<const Eigen::MatrixXd>& cand_vals,
                                                  const Eigen::Ref<const Eigen::MatrixXd>& pool_vals);

struct TheoremViolation {
    std::string theorem;
    std::uint64_t trial = 0;
    std::string detail; ///< JSON counterexample (matrices and values)
};

struct TheoremReport {
    int trials = 0;
    int monotonicity_checks = 0;
    int supermodularity_checks = 0;
    int sandwich_checks = 0;
    int tch_aligned_checks = 0;
    int tch_existence_checks = 0;
    std::vector<TheoremViolation> violations;

    bool ok() const { return violations.empty(); }
    std::string to_json() const;
};

/// Randomized certification of the scalarization theorems: monotonicity
/// and supermodularity on nested random sets (SoM, SSoM, STCH-Set
/// unconditionally; TCH-Set under equal reference points, with explicitly
/// constructed argmax-aligned instances for supermodularity), the
/// smooth-approximation sandwiches, and the small-instance TCH-Set
/// existence check. Trials are independent and seeded per (seed, trial).
TheoremReport theorem_suite(std::uint64_t seed, int trials);

} // namespace qdmoo

#endif
