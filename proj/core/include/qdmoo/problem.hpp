#ifndef QDMOO_PROBLEM_HPP
#define QDMOO_PROBLEM_HPP

#include <Eigen/Core>

#include <memory>
#include <utility>

#include "qdmoo/common.hpp"

namespace qdmoo {

/// Per-dimension closed intervals, lower < upper in every dimension.
struct Bounds {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    static Bounds uniform(int dim, double lower, double upper);

    int dim() const { return static_cast<int>(lo.size()); }
    void validate() const;

    Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
    Eigen::VectorXd range() const { return hi - lo; }
    double volume() const;
    bool contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol = 0.0) const;
    Eigen::VectorXd clamp(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    /// Clamp each row of a (rows x dim) matrix in place.
    void clamp_rows(Eigen::Ref<Eigen::MatrixXd> rows) const;
};

struct ProblemSpec {
    int n = 0; ///< solution dimension
    int d = 0; ///< behavior dimension
    Bounds solution_bounds;
    Bounds behavior_bounds;

    void validate() const;
};

/// One full evaluation of a solution: quality, behavior, and their exact
/// derivatives. jac_b is dense d x n; problems with sparse structure still
/// fill the dense matrix (zeros elsewhere).
struct Evaluation {
    double f = 0.0;
    Eigen::VectorXd grad_f; // n
    Eigen::VectorXd b;      // d
    Eigen::MatrixXd jac_b;  // d x n
};

/// Differentiable QD problem: quality f(x), behavior b(x), exact gradients.
/// Evaluations are pure; concurrent evaluate() calls on a shared const
/// Problem are safe.
class Problem {
public:
    explicit Problem(ProblemSpec spec) : spec_(std::move(spec)) { spec_.validate(); }
    virtual ~Problem() = default;

    const ProblemSpec& spec() const { return spec_; }

    virtual void evaluate(const Eigen::Ref<const Eigen::VectorXd>& x, Evaluation& out) const = 0;

    Evaluation evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const
    {
        Evaluation ev;
        evaluate(x, ev);
        return ev;
    }

protected:
    ProblemSpec spec_;
};

/// Block-aggregation factor for the linear-projection descriptor.
/// Mean keeps b within [-5.12, 5.12]; PaperLiteral reproduces the printed
/// 1/d factor and rescales the behavior bounds accordingly.
enum class DescriptorFactor { Mean, PaperLiteral };

/// y = x inside [-5.12, 5.12], else 5.12/x. Returns (y, dy/dx); the
/// derivative at |x| = 5.12 takes the interior branch.
std::pair<double, double> lp_clip(double x);

/// n times the per-dimension maximum of the shifted Rastrigin over
/// [-5.12, 5.12], computed once by dense scan plus local refinement.
double lp_max_rastrigin(int n);

/// Normalized shifted-Rastrigin quality in [0, 100] over the box; fills the
/// analytic gradient. Throws EvalError on non-finite input.
double lp_objective(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> grad_f);

/// Block descriptor b_k = w * sum_i clip(x_i) over block k, w = d/n (Mean)
/// or 1/d (PaperLiteral). Fills b (d) and the dense Jacobian (d x n).
/// Throws ConfigError when d does not divide n.
void lp_behavior(const Eigen::Ref<const Eigen::VectorXd>& x, int d, DescriptorFactor factor,
                 Eigen::Ref<Eigen::VectorXd> b, Eigen::Ref<Eigen::MatrixXd> jac_b);

/// The Linear Projection benchmark: shifted Rastrigin quality, clipped
/// block-mean behavior descriptor.
class LinearProjection final : public Problem {
public:
    LinearProjection(int n, int d, DescriptorFactor factor = DescriptorFactor::Mean);

    void evaluate(const Eigen::Ref<const Eigen::VectorXd>& x, Evaluation& out) const override;

    DescriptorFactor factor() const { return factor_; }

private:
    DescriptorFactor factor_;
};

/// Small closed-form problem for oracle and scalarization tests:
/// f = offset - ||x||^2, b = first d components, bounds [-1, 1].
class ToySphere final : public Problem {
public:
    ToySphere(int n, int d, double quality_offset = 0.0);

    void evaluate(const Eigen::Ref<const Eigen::VectorXd>& x, Evaluation& out) const override;

private:
    double offset_;
};

std::unique_ptr<Problem> toy_sphere_problem(int n, int d, double quality_offset = 0.0);

} // namespace qdmoo

#endif
