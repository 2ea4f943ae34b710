#ifndef QDMOO_OPTIMIZE_HPP
#define QDMOO_OPTIMIZE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qdmoo/metrics.hpp"
#include "qdmoo/objectives.hpp"
#include "qdmoo/scalarize.hpp"

namespace qdmoo {

/// The solution set X_K, one row per solution. Every row stays within the
/// solution bounds after each optimizer step.
struct SolutionSet {
    Eigen::MatrixXd members; // K x n

    int size() const { return static_cast<int>(members.rows()); }
    int dim() const { return static_cast<int>(members.cols()); }
};

struct AdamState {
    Eigen::MatrixXd m; // K x n first moment
    Eigen::MatrixXd v; // K x n second moment
    long t = 0;
    double lr = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState create(int K, int n, double lr, double beta1 = 0.9, double beta2 = 0.999,
                            double eps = 1e-8);
};

enum class ScalarizationKind { Som, TchSet, Ssom, StchSet, Squad };

std::string scalarization_name(ScalarizationKind k);
ScalarizationKind scalarization_from_name(const std::string& name);

struct OptimConfig {
    int K = 1024;
    int iterations = 1000;
    int batch_size = 64;
    double lr = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-8;
    std::uint64_t seed = 7;
    ScalarizationKind kind = ScalarizationKind::StchSet;
    SmoothParams smooth;
    double gamma_sq = 1.0;
    double epsilon_ref = 0.1;
    StchForm stch_form = StchForm::AppendixD;
    Weights lambda;
    int checkpoint_interval = 100;
    int ref_refresh = 1;    ///< reference-point refresh cadence in steps
    int solution_batch = 0; ///< per-step solution subsample, 0 = all

    void validate(int M) const;
};

/// Rows i.i.d. uniform within bounds; deterministic per seed.
SolutionSet init_population(const Bounds& bounds, int K, std::uint64_t seed);

/// Uniform-without-replacement batches drawn from an epoch-shuffled
/// permutation of [0, M); the union of one epoch's batches is exactly
/// [0, M).
class BatchSampler {
public:
    BatchSampler(int M, int batch_size, std::uint64_t seed);

    std::vector<int> next();

    int M() const { return M_; }
    int batch_size() const { return batch_size_; }

private:
    void reshuffle();

    int M_;
    int batch_size_;
    std::vector<int> perm_;
    int pos_ = 0;
    std::mt19937_64 rng_;
};

struct StepRecord {
    int iter = 0;
    double g_value = 0.0;
    std::vector<int> batch;
    double wall_ms = 0.0;
    std::optional<MetricsReport> metrics;
};

struct RunTrace {
    std::vector<StepRecord> records;
};

/// One optimizer step: evaluate the batch, refresh the reference point
/// (reference-point scalarizations, per cadence), compose the set
/// gradient, apply the bias-corrected Adam update, clamp to bounds.
/// Throws EvalError with the offending (m, k) on non-finite gradients.
StepRecord step(SolutionSet& set, AdamState& adam, std::span<const int> batch,
                const OptimConfig& cfg, const Problem& problem, const BehaviorGrid& grid,
                ReferencePoint& zref);

/// Streaming sink for per-iteration trace records (JSONL writer in the
/// CLI; anything callable in tests). Called after every step and once for
/// the final record; must not mutate run state.
using TraceSink = std::function<void(const StepRecord&)>;

struct RunResult {
    SolutionSet set;
    RunTrace trace;
    MetricsReport final_metrics;
    CvtArchive final_coverage_archive;
};

/// Full optimization loop with checkpoint metric snapshots every
/// cfg.checkpoint_interval iterations and always at the last iteration.
/// iterations = 0 returns the initial population with its metrics.
/// Partial trace reaches the sink before any abort propagates.
RunResult run(const OptimConfig& cfg, const Problem& problem, const BehaviorGrid& grid,
              const MetricsEngine& metrics, const TraceSink& sink = {});

} // namespace qdmoo

#endif
