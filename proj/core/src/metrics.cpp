#include "qdmoo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include <nlohmann/json.hpp>

#include "qdmoo/io.hpp"

namespace qdmoo {

int CvtArchive::occupied_count() const
{
    int c = 0;
    for (char o : occupied)
        c += o != 0;
    return c;
}

void CvtArchive::clear_occupancy()
{
    std::fill(occupied.begin(), occupied.end(), 0);
    best_f.setZero();
}

namespace {

// Row index of the nearest centroid for every sample row, lowest index on
// ties. dists built via ||s||^2 - 2 s.c + ||c||^2 (the ||s||^2 term is
// constant per row and dropped).
Eigen::VectorXi assign_cells(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& centroids)
{
    const Eigen::VectorXd c_sq = centroids.rowwise().squaredNorm();
    Eigen::MatrixXd score = samples * centroids.transpose(); // S x C
    score *= -2.0;
    score.rowwise() += c_sq.transpose();
    Eigen::VectorXi cell(samples.rows());
    for (Eigen::Index i = 0; i < samples.rows(); ++i) {
        Eigen::Index j = 0;
        score.row(i).minCoeff(&j);
        cell[i] = static_cast<int>(j);
    }
    return cell;
}

} // namespace

CvtArchive build_cvt(const Bounds& bounds, int cells, int n_samples, std::uint64_t seed,
                     int max_iters, double tol)
{
    bounds.validate();
    if (cells < 1)
        throw ConfigError("build_cvt: cells must be >= 1");
    if (cells > n_samples)
        throw ConfigError("build_cvt: cells > n_samples");
    if (n_samples < 10 * cells)
        throw ConfigError("build_cvt: need n_samples >= 10 * cells");
    const int d = bounds.dim();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd samples(n_samples, d);
    for (int i = 0; i < n_samples; ++i)
        for (int j = 0; j < d; ++j)
            samples(i, j) = bounds.lo[j] + u(rng) * (bounds.hi[j] - bounds.lo[j]);

    // Initialize centroids with a random subset of the samples.
    std::vector<int> order(static_cast<std::size_t>(n_samples));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::MatrixXd centroids(cells, d);
    for (int c = 0; c < cells; ++c)
        centroids.row(c) = samples.row(order[static_cast<std::size_t>(c)]);

    Eigen::MatrixXd sums(cells, d);
    Eigen::VectorXi counts(cells);
    for (int it = 0; it < max_iters; ++it) {
        const Eigen::VectorXi cell = assign_cells(samples, centroids);
        sums.setZero();
        counts.setZero();
        for (int i = 0; i < n_samples; ++i) {
            sums.row(cell[i]) += samples.row(i);
            counts[cell[i]] += 1;
        }
        double max_shift = 0.0;
        for (int c = 0; c < cells; ++c) {
            if (counts[c] == 0)
                continue; // empty cluster keeps its centroid
            const Eigen::RowVectorXd next = sums.row(c) / counts[c];
            max_shift = std::max(max_shift, (next - centroids.row(c)).norm());
            centroids.row(c) = next;
        }
        if (max_shift < tol)
            break;
    }

    CvtArchive archive;
    archive.centroids = std::move(centroids);
    archive.best_f = Eigen::VectorXd::Zero(cells);
    archive.occupied.assign(static_cast<std::size_t>(cells), 0);
    archive.bounds = bounds;
    archive.seed = seed;
    return archive;
}

int archive_insert(CvtArchive& archive, const Eigen::Ref<const Eigen::VectorXd>& b, double f)
{
    Eigen::VectorXd desc = b;
    if (!archive.bounds.contains(desc)) {
        static std::once_flag warn_once;
        std::call_once(warn_once, [] {
            std::cerr << "qdmoo: descriptor outside archive bounds, clamping\n";
        });
        desc = archive.bounds.clamp(desc);
    }
    Eigen::Index best = 0;
    (archive.centroids.rowwise() - desc.transpose()).rowwise().squaredNorm().minCoeff(&best);
    const auto cell = static_cast<int>(best);
    auto& occ = archive.occupied[static_cast<std::size_t>(cell)];
    if (!occ || f > archive.best_f[cell]) {
        archive.best_f[cell] = f;
        occ = 1;
    }
    return cell;
}

double coverage(const CvtArchive& archive)
{
    return 100.0 * archive.occupied_count() / archive.cells();
}

double qd_score(const CvtArchive& archive)
{
    double s = 0.0;
    for (int c = 0; c < archive.cells(); ++c)
        if (archive.occupied[static_cast<std::size_t>(c)])
            s += archive.best_f[c];
    return s;
}

double vendi_score(const Eigen::Ref<const Eigen::MatrixXd>& behaviors, double sigma_sq)
{
    const auto K = behaviors.rows();
    if (K < 1)
        throw ConfigError("vendi_score: need at least one behavior");
    if (!(sigma_sq > 0.0))
        throw ConfigError("vendi_score: sigma_sq must be > 0");

    Eigen::MatrixXd kernel(K, K);
    for (Eigen::Index i = 0; i < K; ++i) {
        kernel(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < K; ++j) {
            const double k = std::exp(-(behaviors.row(i) - behaviors.row(j)).squaredNorm() / sigma_sq);
            kernel(i, j) = k;
            kernel(j, i) = k;
        }
    }
    kernel /= static_cast<double>(K);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kernel, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
        throw EvalError("vendi_score: eigenvalue decomposition failed");

    // Gaussian kernel matrices are PSD up to roundoff; clamp tiny negatives.
    double entropy = 0.0;
    for (Eigen::Index i = 0; i < K; ++i) {
        const double lam = std::max(eig.eigenvalues()[i], 0.0);
        if (lam > 0.0)
            entropy -= lam * std::log(lam);
    }
    return std::exp(entropy);
}

double qvs(double vendi, double mean_obj)
{
    return mean_obj < 0.0 ? 0.0 : vendi * mean_obj;
}

SoftQdEstimate soft_qd_estimate(std::span<const Evaluation> evals, double sigma,
                                const BehaviorGrid& mc_points)
{
    if (!(sigma > 0.0))
        throw ConfigError("soft_qd_estimate: sigma must be > 0");
    if (mc_points.size() < 1)
        throw ConfigError("soft_qd_estimate: empty Monte-Carlo point set");
    const double two_sigma_sq = 2.0 * sigma * sigma;
    const double volume = mc_points.bounds.volume();
    const auto M = mc_points.size();

    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < M; ++i) {
        double best = 0.0;
        bool first = true;
        for (const Evaluation& ev : evals) {
            const double v = ev.f
                             * std::exp(-(mc_points.points.row(i).transpose() - ev.b).squaredNorm()
                                        / two_sigma_sq);
            if (first || v > best) {
                best = v;
                first = false;
            }
        }
        sum += best;
        sum_sq += best * best;
    }
    const double mean = sum / M;
    const double var = std::max(0.0, sum_sq / M - mean * mean);
    SoftQdEstimate est;
    est.value = volume * mean;
    est.std_error = volume * std::sqrt(var / M);
    return est;
}

std::string MetricsReport::to_json(const std::string& config_hash) const
{
    nlohmann::json j{{"mean_obj", mean_obj}, {"max_obj", max_obj},   {"coverage", coverage},
                     {"vendi", vendi},       {"qd_score", qd_score}, {"qvs", qvs},
                     {"soft_qd", soft_qd},   {"soft_qd_se", soft_qd_se}};
    if (!config_hash.empty())
        j["config_hash"] = config_hash;
    return j.dump();
}

MetricsReport MetricsReport::from_json(const std::string& text)
{
    const auto j = nlohmann::json::parse(text);
    MetricsReport r;
    r.mean_obj = j.at("mean_obj").get<double>();
    r.max_obj = j.at("max_obj").get<double>();
    r.coverage = j.at("coverage").get<double>();
    r.vendi = j.at("vendi").get<double>();
    r.qd_score = j.at("qd_score").get<double>();
    r.qvs = j.at("qvs").get<double>();
    r.soft_qd = j.at("soft_qd").get<double>();
    r.soft_qd_se = j.at("soft_qd_se").get<double>();
    return r;
}

std::string MetricsReport::csv_header()
{
    return "mean_obj,max_obj,coverage,vendi,qd_score,qvs,soft_qd,soft_qd_se";
}

std::string MetricsReport::csv_row() const
{
    std::ostringstream ss;
    ss << fmt_g17(mean_obj) << ',' << fmt_g17(max_obj) << ',' << fmt_g17(coverage) << ','
       << fmt_g17(vendi) << ',' << fmt_g17(qd_score) << ',' << fmt_g17(qvs) << ','
       << fmt_g17(soft_qd) << ',' << fmt_g17(soft_qd_se);
    return ss.str();
}

void MetricsConfig::validate() const
{
    if (cells < 1 || qd_cells < 1)
        throw ConfigError("metrics: cell counts must be >= 1");
    if (samples_per_cell < 10 || qd_samples_per_cell < 10)
        throw ConfigError("metrics: need at least 10 Lloyd samples per cell");
    if (qd_max_iters < 1)
        throw ConfigError("metrics: qd_max_iters must be >= 1");
    if (sigma_v_sq < 0.0 || sigma_soft < 0.0)
        throw ConfigError("metrics: sigma values must be >= 0 (0 = auto)");
}

namespace {

// Pure-function cache for CVT templates; archives are expensive to build
// and fully determined by their construction parameters.
std::shared_ptr<const CvtArchive> cached_cvt(const Bounds& bounds, int cells, int n_samples,
                                             std::uint64_t seed, int max_iters)
{
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const CvtArchive>> cache;

    std::ostringstream key;
    key << cells << '|' << n_samples << '|' << seed << '|' << max_iters;
    for (int i = 0; i < bounds.dim(); ++i)
        key << '|' << fmt_g17(bounds.lo[i]) << '|' << fmt_g17(bounds.hi[i]);

    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key.str());
    if (it != cache.end())
        return it->second;
    auto archive =
        std::make_shared<const CvtArchive>(build_cvt(bounds, cells, n_samples, seed, max_iters));
    cache.emplace(key.str(), archive);
    return archive;
}

} // namespace

MetricsEngine::MetricsEngine(const Bounds& behavior_bounds, MetricsConfig cfg, double gamma_sq)
    : bounds_(behavior_bounds), cfg_(cfg), gamma_sq_(gamma_sq)
{
    bounds_.validate();
    cfg_.validate();
    if (!(gamma_sq > 0.0))
        throw ConfigError("MetricsEngine: gamma_sq must be > 0");
}

const CvtArchive& MetricsEngine::coverage_template() const
{
    if (!coverage_tpl_)
        coverage_tpl_ = cached_cvt(bounds_, cfg_.cells, cfg_.cells * cfg_.samples_per_cell,
                                   cfg_.archive_seed, 200);
    return *coverage_tpl_;
}

const CvtArchive& MetricsEngine::qd_template() const
{
    if (!qd_tpl_)
        qd_tpl_ = cached_cvt(bounds_, cfg_.qd_cells, cfg_.qd_cells * cfg_.qd_samples_per_cell,
                             cfg_.archive_seed + 1, cfg_.qd_max_iters);
    return *qd_tpl_;
}

MetricsReport MetricsEngine::compute(const Eigen::Ref<const Eigen::MatrixXd>& solutions,
                                     const Problem& problem, const BehaviorGrid& mc_points,
                                     CvtArchive* coverage_archive_out) const
{
    std::vector<Evaluation> evals(static_cast<std::size_t>(solutions.rows()));
    for (Eigen::Index i = 0; i < solutions.rows(); ++i)
        problem.evaluate(solutions.row(i).transpose(), evals[static_cast<std::size_t>(i)]);
    return compute(evals, mc_points, coverage_archive_out);
}

MetricsReport MetricsEngine::compute(std::span<const Evaluation> evals, const BehaviorGrid& mc_points,
                                     CvtArchive* coverage_archive_out) const
{
    if (evals.empty())
        throw ConfigError("MetricsEngine: empty solution set");
    const int K = static_cast<int>(evals.size());
    const int d = bounds_.dim();

    MetricsReport r;
    r.mean_obj = 0.0;
    r.max_obj = evals[0].f;
    Eigen::MatrixXd behaviors(K, d);
    for (int i = 0; i < K; ++i) {
        r.mean_obj += evals[static_cast<std::size_t>(i)].f;
        r.max_obj = std::max(r.max_obj, evals[static_cast<std::size_t>(i)].f);
        behaviors.row(i) = evals[static_cast<std::size_t>(i)].b.transpose();
    }
    r.mean_obj /= K;

    CvtArchive cov = coverage_template();
    CvtArchive qd = qd_template();
    for (int i = 0; i < K; ++i) {
        archive_insert(cov, behaviors.row(i).transpose(), evals[static_cast<std::size_t>(i)].f);
        archive_insert(qd, behaviors.row(i).transpose(), evals[static_cast<std::size_t>(i)].f);
    }
    r.coverage = coverage(cov);
    r.qd_score = qd_score(qd);

    // Vendi bandwidth heuristic is stated for the unit box; normalize by
    // the behavior bounds before applying sigma_v^2 = d/6.
    double sigma_v = cfg_.sigma_v_sq;
    Eigen::MatrixXd vendi_b = behaviors;
    if (sigma_v == 0.0) {
        sigma_v = static_cast<double>(d) / 6.0;
        const Eigen::RowVectorXd lo = bounds_.lo.transpose();
        const Eigen::RowVectorXd range = bounds_.range().transpose();
        vendi_b = ((behaviors.rowwise() - lo).array().rowwise() / range.array()).matrix();
    }
    r.vendi = vendi_score(vendi_b, sigma_v);
    r.qvs = qvs(r.vendi, r.mean_obj);

    const double sigma_soft = cfg_.sigma_soft > 0.0 ? cfg_.sigma_soft : std::sqrt(gamma_sq_ / 2.0);
    const auto soft = soft_qd_estimate(evals, sigma_soft, mc_points);
    r.soft_qd = soft.value;
    r.soft_qd_se = soft.std_error;

    if (coverage_archive_out)
        *coverage_archive_out = std::move(cov);
    return r;
}

void save_archive_csv(const CvtArchive& archive, const std::string& path,
                      const std::string& config_hash)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw EvalError("cannot open for writing: " + path);
    if (!config_hash.empty())
        out << "# config_hash=" << config_hash << "\n";
    out << "# cells=" << archive.cells() << "\n";
    for (int j = 0; j < archive.centroids.cols(); ++j)
        out << 's' << j + 1 << ',';
    out << "best_f\n";
    for (int c = 0; c < archive.cells(); ++c) {
        for (int j = 0; j < archive.centroids.cols(); ++j)
            out << fmt_g17(archive.centroids(c, j)) << ',';
        if (archive.occupied[static_cast<std::size_t>(c)])
            out << fmt_g17(archive.best_f[c]);
        out << "\n";
    }
}

} // namespace qdmoo
