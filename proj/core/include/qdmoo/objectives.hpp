#ifndef QDMOO_OBJECTIVES_HPP
#define QDMOO_OBJECTIVES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qdmoo/problem.hpp"

namespace qdmoo {

enum class GridMethod { Sobol, Uniform, Lattice, Custom };

std::string grid_method_name(GridMethod m);
GridMethod grid_method_from_name(const std::string& name);

/// Dense set of target behavior descriptors spanning the behavior space.
/// Immutable after construction; deterministic given (method, seed, M).
struct BehaviorGrid {
    Eigen::MatrixXd points; // M x d
    Bounds bounds;
    GridMethod method = GridMethod::Sobol;
    std::uint64_t seed = 0;

    int size() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }
};

/// M points covering the box. Sobol is the default; uniform is kept for
/// ablation; lattice is an additive-recurrence (Kronecker) sequence. All
/// methods place the box center first for M = 1 convention except uniform.
BehaviorGrid generate_grid(const Bounds& bounds, int M, GridMethod method, std::uint64_t seed);

void save_grid_csv(const BehaviorGrid& grid, const std::string& path,
                   const std::string& config_hash = "");
BehaviorGrid load_grid_csv(const std::string& path, const Bounds& bounds);

struct KernelParams {
    double gamma_sq = 1.0; ///< kernel bandwidth gamma^2, > 0

    void validate() const
    {
        if (!(gamma_sq > 0.0))
            throw ConfigError("KernelParams: gamma_sq must be > 0");
    }
};

/// v~_m(x) = -f(x) * exp(-||b_m - b(x)||^2 / gamma^2). Exp underflow
/// saturates to 0, a valid limit.
double eval_vtilde(const Evaluation& ev, const Eigen::Ref<const Eigen::VectorXd>& target,
                   const KernelParams& k);

/// Exact gradient of eval_vtilde with respect to x, via the cached grad_f
/// and jac_b.
Eigen::VectorXd grad_vtilde(const Evaluation& ev, const Eigen::Ref<const Eigen::VectorXd>& target,
                            const KernelParams& k);

/// Batch of objective values for a solution set: values(i, k) is
/// v~_{index_map[i]}(x^(k)). kernels caches the Gaussian factors so set
/// gradients avoid dividing by f. Each solution is evaluated exactly once
/// per eval_matrix call.
struct ObjectiveMatrix {
    Eigen::MatrixXd values;  // B x K
    Eigen::MatrixXd kernels; // B x K, exp(-D/gamma^2)
    std::vector<int> index_map;
    std::vector<Evaluation> evals; // K cached evaluations

    int batch_size() const { return static_cast<int>(values.rows()); }
    int set_size() const { return static_cast<int>(values.cols()); }
};

ObjectiveMatrix eval_matrix(const Eigen::Ref<const Eigen::MatrixXd>& solutions /* K x n */,
                            const BehaviorGrid& grid, std::span<const int> batch,
                            const KernelParams& k, const Problem& problem);

/// Composes per-solution set gradients from a scalarization weight matrix:
/// column k of the result is sum_m W(m, k) * grad v~_m(x^(k)), returned as
/// a K x n matrix. Uses the factored form through f, b and J_b so the cost
/// is O(B K d + K n) rather than O(B K n).
Eigen::MatrixXd set_gradient(const ObjectiveMatrix& V, const Eigen::Ref<const Eigen::MatrixXd>& W,
                             const BehaviorGrid& grid, const KernelParams& k);

} // namespace qdmoo

#endif
