#ifndef QDMOO_SCALARIZE_HPP
#define QDMOO_SCALARIZE_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qdmoo/objectives.hpp"

namespace qdmoo {

/// Smoothing parameters for the log-sum-exp operators. mu_inner, when set,
/// gives the per-objective inner smoothing of the generalized STCH-Set
/// form; it defaults to mu.
struct SmoothParams {
    double mu = 0.01;
    std::optional<double> mu_inner;

    double inner() const { return mu_inner.value_or(mu); }
    void validate() const;
};

/// Nonnegative per-objective weights; empty means uniform (all ones).
struct Weights {
    Eigen::VectorXd lambda;

    bool uniform() const { return lambda.size() == 0; }
    void validate() const;
    /// Materialize to length m (ones when uniform; checked slice otherwise).
    Eigen::VectorXd expand(int m) const;
    /// Weights restricted to the given objective indices (uniform stays
    /// uniform).
    Weights slice(std::span<const int> rows) const;
};

/// Per-objective reference values z*_m with running-minimum semantics:
/// update never raises z, so z_m always sits at least epsilon below the
/// best value seen for objective m. Rows are lazily initialized on first
/// update.
struct ReferencePoint {
    Eigen::VectorXd z;
    std::vector<char> initialized;
    double epsilon = 0.1;

    ReferencePoint() = default;
    ReferencePoint(int M, double eps);

    int size() const { return static_cast<int>(z.size()); }
    bool covered(std::span<const int> rows) const;
    /// z values for the given objective indices; throws EvalError if any
    /// requested row has never been updated.
    Eigen::VectorXd slice(std::span<const int> rows) const;
};

/// z_rows[i] <- min(z_rows[i], min_k V(i, k) - epsilon); rows outside the
/// batch keep their prior values.
void update_reference_point(ReferencePoint& ref, const Eigen::Ref<const Eigen::MatrixXd>& V,
                            std::span<const int> rows);

/// Value of a set scalarization together with the B x K weight matrix W
/// such that the gradient w.r.t. x^(k) is sum_m W(m,k) * grad v~_m(x^(k)).
/// For SoM/TCH-Set, W is a subgradient selection (lowest index on ties);
/// for SSoM/STCH-Set, W is dense with the softmin/softmax structure.
struct ScalarizationResult {
    double value = 0.0;
    Eigen::MatrixXd weight_matrix;
};

/// Numerically stable (max-shifted) smooth min/max:
/// smin_mu(a) = -mu log sum exp(-a_i/mu), smax_mu(a) = mu log sum exp(a_i/mu).
double smooth_min(const Eigen::Ref<const Eigen::VectorXd>& values, double mu);
double smooth_max(const Eigen::Ref<const Eigen::VectorXd>& values, double mu);

/// Sum-of-Minimum: g = sum_m lambda_m min_k V(m, k).
ScalarizationResult som_value(const Eigen::Ref<const Eigen::MatrixXd>& V, const Weights& w = {});

/// Tchebycheff set: g = max_m lambda_m (min_k V(m, k) - z_m).
ScalarizationResult tch_set_value(const Eigen::Ref<const Eigen::MatrixXd>& V,
                                  const Eigen::Ref<const Eigen::VectorXd>& z, const Weights& w = {});

/// Smooth Sum-of-Minimum: g = sum_m lambda_m smin_mu over k of V(m, k).
ScalarizationResult ssom_value(const Eigen::Ref<const Eigen::MatrixXd>& V, const SmoothParams& sp,
                               const Weights& w = {});

/// Which STCH-Set exponent to use. AppendixD divides the whole inner term
/// (including z_m) by mu, as the generalized derivation implies;
/// PrintedEq13 reproduces the printed equation where z_m is not divided
/// by mu.
enum class StchForm { AppendixD, PrintedEq13 };

std::string stch_form_name(StchForm f);
StchForm stch_form_from_name(const std::string& name);

/// Smooth Tchebycheff set: outer smooth max over objectives of the
/// weighted, reference-shifted inner smooth min over solutions.
ScalarizationResult stch_set_value(const Eigen::Ref<const Eigen::MatrixXd>& V,
                                   const Eigen::Ref<const Eigen::VectorXd>& z,
                                   const SmoothParams& sp, const Weights& w = {},
                                   StchForm form = StchForm::AppendixD);

/// SQUAD objective (a maximization objective): sum_k f_k minus the
/// quality-weighted pairwise behavioral repulsion. grads holds the K x n
/// ascent gradients. Throws EvalError for negative quality (the sqrt in
/// the pairwise term is undefined there; shift or clamp the quality
/// upstream).
struct SquadResult {
    double value = 0.0;
    Eigen::MatrixXd grads; // K x n
};

SquadResult squad_value(const std::vector<Evaluation>& evals, double gamma_sq);

} // namespace qdmoo

#endif
