#include "qdmoo/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "qdmoo/io.hpp"
#include "qdmoo/sobol.hpp"

namespace qdmoo {

std::string grid_method_name(GridMethod m)
{
    switch (m) {
    case GridMethod::Sobol: return "sobol";
    case GridMethod::Uniform: return "uniform";
    case GridMethod::Lattice: return "lattice";
    case GridMethod::Custom: return "custom";
    }
    return "?";
}

GridMethod grid_method_from_name(const std::string& name)
{
    if (name == "sobol")
        return GridMethod::Sobol;
    if (name == "uniform")
        return GridMethod::Uniform;
    if (name == "lattice")
        return GridMethod::Lattice;
    if (name == "custom")
        return GridMethod::Custom;
    throw ConfigError("unknown grid method '" + name + "' (expected sobol|uniform|lattice)");
}

namespace {

// Additive-recurrence (Kronecker) lattice with the generalized golden
// ratio: alpha_j = 1/phi_d^(j+1) with phi_d the root of x^(d+1) = x + 1.
// Offset 0.5 puts the first point at the cube center.
Eigen::MatrixXd lattice_unit(int M, int d)
{
    double phi = 1.5;
    for (int it = 0; it < 64; ++it)
        phi = std::pow(1.0 + phi, 1.0 / (d + 1));
    Eigen::VectorXd alpha(d);
    double a = 1.0;
    for (int j = 0; j < d; ++j) {
        a /= phi;
        alpha[j] = a;
    }
    Eigen::MatrixXd pts(M, d);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < d; ++j) {
            double v = 0.5 + i * alpha[j];
            pts(i, j) = v - std::floor(v);
        }
    return pts;
}

void check_unique_rows(const Eigen::MatrixXd& pts)
{
    const auto M = pts.rows();
    std::vector<int> order(static_cast<std::size_t>(M));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        for (Eigen::Index j = 0; j < pts.cols(); ++j) {
            if (pts(a, j) != pts(b, j))
                return pts(a, j) < pts(b, j);
        }
        return false;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if ((pts.row(order[i]) - pts.row(order[i - 1])).cwiseAbs().maxCoeff() <= 1e-12)
            throw ConfigError("generate_grid: duplicate target rows (within 1e-12)");
    }
}

} // namespace

BehaviorGrid generate_grid(const Bounds& bounds, int M, GridMethod method, std::uint64_t seed)
{
    bounds.validate();
    if (M < 1)
        throw ConfigError("generate_grid: M must be >= 1");
    const int d = bounds.dim();

    Eigen::MatrixXd unit;
    switch (method) {
    case GridMethod::Sobol:
        unit = SobolSequence(d).generate(M);
        break;
    case GridMethod::Uniform: {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        unit.resize(M, d);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < d; ++j)
                unit(i, j) = u(rng);
        break;
    }
    case GridMethod::Lattice:
        unit = lattice_unit(M, d);
        break;
    case GridMethod::Custom:
        throw ConfigError("generate_grid: custom grids are loaded, not generated");
    }

    BehaviorGrid grid;
    grid.points = (unit.array().rowwise() * bounds.range().transpose().array()).matrix();
    grid.points.rowwise() += bounds.lo.transpose();
    grid.bounds = bounds;
    grid.method = method;
    grid.seed = seed;
    check_unique_rows(grid.points);
    return grid;
}

void save_grid_csv(const BehaviorGrid& grid, const std::string& path, const std::string& config_hash)
{
    std::vector<std::string> comments;
    if (!config_hash.empty())
        comments.push_back("config_hash=" + config_hash);
    comments.push_back("method=" + grid_method_name(grid.method));
    comments.push_back("seed=" + std::to_string(grid.seed));
    write_matrix_csv(path, grid.points, comments);
}

BehaviorGrid load_grid_csv(const std::string& path, const Bounds& bounds)
{
    BehaviorGrid grid;
    grid.points = read_matrix_csv(path);
    if (grid.points.rows() < 1)
        throw ConfigError("load_grid_csv: empty grid in " + path);
    if (grid.points.cols() != bounds.dim())
        throw ConfigError("load_grid_csv: grid dimension mismatch in " + path);
    for (Eigen::Index i = 0; i < grid.points.rows(); ++i)
        if (!bounds.contains(grid.points.row(i).transpose(), 1e-9))
            throw ConfigError("load_grid_csv: row " + std::to_string(i) + " outside bounds");
    grid.bounds = bounds;
    grid.method = GridMethod::Custom;
    grid.seed = 0;
    return grid;
}

double eval_vtilde(const Evaluation& ev, const Eigen::Ref<const Eigen::VectorXd>& target,
                   const KernelParams& k)
{
    k.validate();
    if (target.size() != ev.b.size())
        throw ConfigError("eval_vtilde: target/behavior dimension mismatch");
    const double dist_sq = (target - ev.b).squaredNorm();
    return -ev.f * std::exp(-dist_sq / k.gamma_sq);
}

Eigen::VectorXd grad_vtilde(const Evaluation& ev, const Eigen::Ref<const Eigen::VectorXd>& target,
                            const KernelParams& k)
{
    k.validate();
    const Eigen::VectorXd r = target - ev.b;
    const double kern = std::exp(-r.squaredNorm() / k.gamma_sq);
    // d/dx [-f e^(-D/g2)] = -e^(-D/g2) grad_f + (2 f e^(-D/g2) / g2) J_b^T (b - b_m)
    return -kern * ev.grad_f - (2.0 * ev.f * kern / k.gamma_sq) * (ev.jac_b.transpose() * r);
}

ObjectiveMatrix eval_matrix(const Eigen::Ref<const Eigen::MatrixXd>& solutions,
                            const BehaviorGrid& grid, std::span<const int> batch,
                            const KernelParams& k, const Problem& problem)
{
    k.validate();
    const int K = static_cast<int>(solutions.rows());
    const int B = static_cast<int>(batch.size());
    const int M = grid.size();
    for (int idx : batch)
        if (idx < 0 || idx >= M)
            throw ConfigError("eval_matrix: batch index " + std::to_string(idx)
                              + " out of range [0, " + std::to_string(M) + ")");

    ObjectiveMatrix out;
    out.index_map.assign(batch.begin(), batch.end());
    out.evals.resize(static_cast<std::size_t>(K));
    for (int kk = 0; kk < K; ++kk)
        problem.evaluate(solutions.row(kk).transpose(), out.evals[static_cast<std::size_t>(kk)]);

    out.values.resize(B, K);
    out.kernels.resize(B, K);
    for (int kk = 0; kk < K; ++kk) {
        const Evaluation& ev = out.evals[static_cast<std::size_t>(kk)];
        for (int bi = 0; bi < B; ++bi) {
            const double dist_sq =
                (grid.points.row(batch[static_cast<std::size_t>(bi)]).transpose() - ev.b).squaredNorm();
            const double kern = std::exp(-dist_sq / k.gamma_sq);
            out.kernels(bi, kk) = kern;
            out.values(bi, kk) = -ev.f * kern;
        }
    }
    return out;
}

Eigen::MatrixXd set_gradient(const ObjectiveMatrix& V, const Eigen::Ref<const Eigen::MatrixXd>& W,
                             const BehaviorGrid& grid, const KernelParams& k)
{
    const int B = V.batch_size();
    const int K = V.set_size();
    if (W.rows() != B || W.cols() != K)
        throw ConfigError("set_gradient: weight matrix shape mismatch");
    if (V.evals.empty())
        throw ConfigError("set_gradient: objective matrix has no cached evaluations");
    const int n = static_cast<int>(V.evals.front().grad_f.size());
    const int d = grid.dim();

    Eigen::MatrixXd grads(K, n);
    Eigen::VectorXd u(d);
    for (int kk = 0; kk < K; ++kk) {
        const Evaluation& ev = V.evals[static_cast<std::size_t>(kk)];
        double alpha = 0.0;
        u.setZero();
        for (int bi = 0; bi < B; ++bi) {
            const double we = W(bi, kk) * V.kernels(bi, kk);
            if (we == 0.0)
                continue;
            alpha -= we;
            u += we * (grid.points.row(V.index_map[static_cast<std::size_t>(bi)]).transpose() - ev.b);
        }
        u *= -2.0 * ev.f / k.gamma_sq;
        grads.row(kk) = (alpha * ev.grad_f + ev.jac_b.transpose() * u).transpose();
    }
    return grads;
}

} // namespace qdmoo
