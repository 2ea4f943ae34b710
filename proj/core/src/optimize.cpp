#include "qdmoo/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace qdmoo {

AdamState AdamState::create(int K, int n, double lr, double beta1, double beta2, double eps)
{
    AdamState s;
    s.m = Eigen::MatrixXd::Zero(K, n);
    s.v = Eigen::MatrixXd::Zero(K, n);
    s.t = 0;
    s.lr = lr;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps = eps;
    return s;
}

std::string scalarization_name(ScalarizationKind k)
{
    switch (k) {
    case ScalarizationKind::Som: return "som";
    case ScalarizationKind::TchSet: return "tch-set";
    case ScalarizationKind::Ssom: return "ssom";
    case ScalarizationKind::StchSet: return "stch-set";
    case ScalarizationKind::Squad: return "squad";
    }
    return "?";
}

ScalarizationKind scalarization_from_name(const std::string& name)
{
    if (name == "som")
        return ScalarizationKind::Som;
    if (name == "tch-set")
        return ScalarizationKind::TchSet;
    if (name == "ssom")
        return ScalarizationKind::Ssom;
    if (name == "stch-set")
        return ScalarizationKind::StchSet;
    if (name == "squad")
        return ScalarizationKind::Squad;
    throw ConfigError("unknown scalarization '" + name
                      + "' (expected som|tch-set|ssom|stch-set|squad)");
}

void OptimConfig::validate(int M) const
{
    if (K < 1)
        throw ConfigError("optimizer: K must be >= 1");
    if (iterations < 0)
        throw ConfigError("optimizer: iterations must be >= 0");
    if (batch_size < 1 || batch_size > M)
        throw ConfigError("optimizer: need 1 <= batch_size <= M");
    if (!(lr > 0.0))
        throw ConfigError("optimizer: lr must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw ConfigError("optimizer: betas must be in [0, 1)");
    if (!(eps_adam > 0.0))
        throw ConfigError("optimizer: eps_adam must be > 0");
    if (!(gamma_sq > 0.0))
        throw ConfigError("optimizer: gamma_sq must be > 0");
    if (!(epsilon_ref > 0.0))
        throw ConfigError("optimizer: epsilon_ref must be > 0");
    if (checkpoint_interval < 1)
        throw ConfigError("optimizer: checkpoint_interval must be >= 1");
    if (ref_refresh < 1)
        throw ConfigError("optimizer: ref_refresh must be >= 1");
    if (solution_batch < 0 || solution_batch > K)
        throw ConfigError("optimizer: need 0 <= solution_batch <= K");
    smooth.validate();
    lambda.validate();
}

SolutionSet init_population(const Bounds& bounds, int K, std::uint64_t seed)
{
    bounds.validate();
    if (K < 1)
        throw ConfigError("init_population: K must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SolutionSet set;
    set.members.resize(K, bounds.dim());
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < bounds.dim(); ++j)
            set.members(i, j) = bounds.lo[j] + u(rng) * (bounds.hi[j] - bounds.lo[j]);
    return set;
}

BatchSampler::BatchSampler(int M, int batch_size, std::uint64_t seed)
    : M_(M), batch_size_(batch_size), rng_(seed)
{
    if (M < 1 || batch_size < 1 || batch_size > M)
        throw ConfigError("BatchSampler: need 1 <= batch_size <= M");
    perm_.resize(static_cast<std::size_t>(M));
    std::iota(perm_.begin(), perm_.end(), 0);
    reshuffle();
}

void BatchSampler::reshuffle()
{
    std::shuffle(perm_.begin(), perm_.end(), rng_);
    pos_ = 0;
}

std::vector<int> BatchSampler::next()
{
    if (pos_ >= M_)
        reshuffle();
    const int take = std::min(batch_size_, M_ - pos_);
    std::vector<int> batch(perm_.begin() + pos_, perm_.begin() + pos_ + take);
    pos_ += take;
    return batch;
}

namespace {

bool uses_reference_point(ScalarizationKind k)
{
    return k == ScalarizationKind::TchSet || k == ScalarizationKind::StchSet;
}

// Lazily initialize rows never seen before; full refresh only on cadence.
void refresh_reference(ReferencePoint& zref, const ObjectiveMatrix& V, std::span<const int> batch,
                       bool cadence_due)
{
    if (cadence_due) {
        update_reference_point(zref, V.values, batch);
        return;
    }
    std::vector<int> missing;
    std::vector<Eigen::Index> missing_rows;
    for (std::size_t i = 0; i < batch.size(); ++i)
        if (!zref.initialized[static_cast<std::size_t>(batch[i])]) {
            missing.push_back(batch[i]);
            missing_rows.push_back(static_cast<Eigen::Index>(i));
        }
    if (missing.empty())
        return;
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(missing.size()), V.values.cols());
    for (std::size_t i = 0; i < missing_rows.size(); ++i)
        sub.row(static_cast<Eigen::Index>(i)) = V.values.row(missing_rows[i]);
    update_reference_point(zref, sub, missing);
}

void throw_nonfinite(const ObjectiveMatrix& V, const Eigen::MatrixXd& grads, int iter)
{
    for (Eigen::Index k = 0; k < grads.rows(); ++k) {
        if (grads.row(k).allFinite())
            continue;
        int bad_m = -1;
        for (Eigen::Index b = 0; b < V.values.rows(); ++b)
            if (!std::isfinite(V.values(b, k))) {
                bad_m = V.index_map[static_cast<std::size_t>(b)];
                break;
            }
        throw EvalError("step " + std::to_string(iter) + ": non-finite gradient for solution k="
                        + std::to_string(k) + (bad_m >= 0 ? ", objective m=" + std::to_string(bad_m)
                                                          : std::string(", objective m=unresolved")));
    }
}

} // namespace

StepRecord step(SolutionSet& set, AdamState& adam, std::span<const int> batch,
                const OptimConfig& cfg, const Problem& problem, const BehaviorGrid& grid,
                ReferencePoint& zref)
{
    const auto t0 = std::chrono::steady_clock::now();
    const KernelParams kernel{cfg.gamma_sq};
    const int K = set.size();

    StepRecord rec;
    rec.batch.assign(batch.begin(), batch.end());

    Eigen::MatrixXd grads;
    if (cfg.kind == ScalarizationKind::Squad) {
        ObjectiveMatrix V = eval_matrix(set.members, grid, batch, kernel, problem);
        const SquadResult sq = squad_value(V.evals, cfg.gamma_sq);
        rec.g_value = sq.value;
        grads = -sq.grads; // ascend the SQUAD objective
        throw_nonfinite(V, grads, static_cast<int>(adam.t));
    } else {
        ObjectiveMatrix V = eval_matrix(set.members, grid, batch, kernel, problem);
        ScalarizationResult res;
        switch (cfg.kind) {
        case ScalarizationKind::Som:
            res = som_value(V.values, cfg.lambda.uniform() ? Weights{}
                                                           : Weights{slice_lambda(cfg.lambda, batch)});
            break;
        case ScalarizationKind::TchSet: {
            refresh_reference(zref, V, batch, adam.t % cfg.ref_refresh == 0);
            res = tch_set_value(V.values, zref.slice(batch),
                                cfg.lambda.uniform() ? Weights{}
                                                     : Weights{slice_lambda(cfg.lambda, batch)});
            break;
        }
        case ScalarizationKind::Ssom:
            res = ssom_value(V.values, cfg.smooth,
                             cfg.lambda.uniform() ? Weights{}
                                                  : Weights{slice_lambda(cfg.lambda, batch)});
            break;
        case ScalarizationKind::StchSet: {
            refresh_reference(zref, V, batch, adam.t % cfg.ref_refresh == 0);
            res = stch_set_value(V.values, zref.slice(batch), cfg.smooth,
                                 cfg.lambda.uniform() ? Weights{}
                                                      : Weights{slice_lambda(cfg.lambda, batch)},
                                 cfg.stch_form);
            break;
        }
        default:
            throw ConfigError("step: unsupported scalarization");
        }
        rec.g_value = res.value;
        grads = set_gradient(V, res.weight_matrix, grid, kernel);
        throw_nonfinite(V, grads, static_cast<int>(adam.t));
    }

    // Optional per-step solution subsample: zero the gradient of solutions
    // outside the subset so their state does not move this step.
    std::vector<char> active(static_cast<std::size_t>(K), 1);
    if (cfg.solution_batch > 0 && cfg.solution_batch < K) {
        std::fill(active.begin(), active.end(), 0);
        std::mt19937_64 rng(derive_seed(cfg.seed, 0x50b5 + static_cast<std::uint64_t>(adam.t)));
        std::vector<int> idx(static_cast<std::size_t>(K));
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (int i = 0; i < cfg.solution_batch; ++i)
            active[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 1;
    }

    adam.t += 1;
    const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(adam.t));
    const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(adam.t));
    for (int k = 0; k < K; ++k) {
        if (!active[static_cast<std::size_t>(k)])
            continue;
        adam.m.row(k) = adam.beta1 * adam.m.row(k) + (1.0 - adam.beta1) * grads.row(k);
        adam.v.row(k) =
            adam.beta2 * adam.v.row(k) + (1.0 - adam.beta2) * grads.row(k).cwiseAbs2();
        const Eigen::RowVectorXd m_hat = adam.m.row(k) / bc1;
        const Eigen::RowVectorXd v_hat = adam.v.row(k) / bc2;
        set.members.row(k) -=
            adam.lr * (m_hat.array() / (v_hat.array().sqrt() + adam.eps)).matrix();
    }
    problem.spec().solution_bounds.clamp_rows(set.members);

    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

RunResult run(const OptimConfig& cfg, const Problem& problem, const BehaviorGrid& grid,
              const MetricsEngine& metrics, const TraceSink& sink)
{
    cfg.validate(grid.size());

    RunResult result;
    result.set = init_population(problem.spec().solution_bounds, cfg.K,
                                 derive_seed(cfg.seed, 0x1217));
    AdamState adam = AdamState::create(cfg.K, problem.spec().n, cfg.lr, cfg.beta1, cfg.beta2,
                                       cfg.eps_adam);
    BatchSampler sampler(grid.size(), cfg.batch_size, derive_seed(cfg.seed, 0xba7c));
    ReferencePoint zref(grid.size(), cfg.epsilon_ref);

    auto snapshot = [&](int iter, double g_value, std::vector<int> batch, double wall_ms,
                        bool with_metrics) {
        StepRecord rec;
        rec.iter = iter;
        rec.g_value = g_value;
        rec.batch = std::move(batch);
        rec.wall_ms = wall_ms;
        if (with_metrics) {
            rec.metrics = metrics.compute(result.set.members, problem, grid,
                                          &result.final_coverage_archive);
            result.final_metrics = *rec.metrics;
        }
        if (sink)
            sink(rec);
        result.trace.records.push_back(std::move(rec));
    };

    if (cfg.iterations == 0) {
        snapshot(0, 0.0, {}, 0.0, true);
        return result;
    }

    try {
        for (int iter = 1; iter <= cfg.iterations; ++iter) {
            const std::vector<int> batch = sampler.next();
            StepRecord rec = step(result.set, adam, batch, cfg, problem, grid, zref);
            rec.iter = iter;
            const bool checkpoint =
                iter % cfg.checkpoint_interval == 0 || iter == cfg.iterations;
            if (checkpoint) {
                rec.metrics = metrics.compute(result.set.members, problem, grid,
                                              &result.final_coverage_archive);
                result.final_metrics = *rec.metrics;
            }
            if (sink)
                sink(rec);
            result.trace.records.push_back(std::move(rec));
        }
    } catch (...) {
        // Partial trace has already reached the sink record by record.
        throw;
    }
    return result;
}

} // namespace qdmoo
