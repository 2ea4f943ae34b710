#ifndef QDMOO_METRICS_HPP
#define QDMOO_METRICS_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qdmoo/objectives.hpp"
#include "qdmoo/problem.hpp"

namespace qdmoo {

/// Centroidal Voronoi tessellation of the behavior space with best-quality
/// occupancy per cell.
struct CvtArchive {
    Eigen::MatrixXd centroids; // C x d
    Eigen::VectorXd best_f;    // C, valid where occupied
    std::vector<char> occupied;
    Bounds bounds;
    std::uint64_t seed = 0;

    int cells() const { return static_cast<int>(centroids.rows()); }
    int occupied_count() const;
    void clear_occupancy();
};

/// Lloyd k-means over n_samples uniform points until the max centroid
/// shift drops below tol or max_iters passes. Deterministic per seed.
CvtArchive build_cvt(const Bounds& bounds, int cells, int n_samples, std::uint64_t seed,
                     int max_iters = 200, double tol = 1e-6);

/// Insert a descriptor into its nearest-centroid cell (lowest index on
/// ties), keeping the maximum quality. Descriptors outside the bounds are
/// clamped (warned once per archive). Returns the cell index.
int archive_insert(CvtArchive& archive, const Eigen::Ref<const Eigen::VectorXd>& b, double f);

double coverage(const CvtArchive& archive);  ///< percent occupied
double qd_score(const CvtArchive& archive);  ///< sum of occupied best_f

/// Effective number of distinct behaviors: exp of the eigenvalue entropy
/// of the normalized Gaussian kernel matrix. Result is in [1, K].
double vendi_score(const Eigen::Ref<const Eigen::MatrixXd>& behaviors /* K x d */, double sigma_sq);

/// Vendi score times mean objective, floored at 0 for negative means.
double qvs(double vendi, double mean_obj);

struct SoftQdEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo estimate of the Soft QD Score: volume(B) times the mean
/// over mc_points of max_k f_k exp(-||b - b_k||^2 / (2 sigma^2)).
SoftQdEstimate soft_qd_estimate(std::span<const Evaluation> evals, double sigma,
                                const BehaviorGrid& mc_points);

/// The six scalar metrics for one solution set plus the Monte-Carlo Soft
/// QD Score.
struct MetricsReport {
    double mean_obj = 0.0;
    double max_obj = 0.0;
    double coverage = 0.0; // percent of coverage-archive cells
    double vendi = 0.0;
    double qd_score = 0.0; // over the QD-score archive
    double qvs = 0.0;
    double soft_qd = 0.0;
    double soft_qd_se = 0.0;

    std::string to_json(const std::string& config_hash = "") const;
    static MetricsReport from_json(const std::string& text);
    static std::string csv_header();
    std::string csv_row() const;
};

/// Metric configuration. Zero sigma values mean "auto": sigma_v_sq = d/6
/// applied to behaviors normalized to the unit box, sigma_soft =
/// sqrt(gamma_sq / 2) in raw behavior units.
struct MetricsConfig {
    int cells = 512;       ///< coverage archive
    int qd_cells = 10000;  ///< QD-score archive
    int samples_per_cell = 50;
    int qd_samples_per_cell = 10;
    int qd_max_iters = 30;
    std::uint64_t archive_seed = 99;
    double sigma_v_sq = 0.0;
    double sigma_soft = 0.0;

    void validate() const;
};

/// Builds the two CVT archives once (process-wide cached by construction
/// parameters) and computes MetricsReports against immutable copies.
class MetricsEngine {
public:
    MetricsEngine(const Bounds& behavior_bounds, MetricsConfig cfg, double gamma_sq);

    MetricsReport compute(const Eigen::Ref<const Eigen::MatrixXd>& solutions,
                          const Problem& problem, const BehaviorGrid& mc_points,
                          CvtArchive* coverage_archive_out = nullptr) const;

    MetricsReport compute(std::span<const Evaluation> evals, const BehaviorGrid& mc_points,
                          CvtArchive* coverage_archive_out = nullptr) const;

    const MetricsConfig& config() const { return cfg_; }
    const CvtArchive& coverage_template() const;
    const CvtArchive& qd_template() const;

private:
    Bounds bounds_;
    MetricsConfig cfg_;
    double gamma_sq_;
    mutable std::shared_ptr<const CvtArchive> coverage_tpl_;
    mutable std::shared_ptr<const CvtArchive> qd_tpl_;
};

void save_archive_csv(const CvtArchive& archive, const std::string& path,
                      const std::string& config_hash = "");

} // namespace qdmoo

#endif
