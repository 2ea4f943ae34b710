#ifndef QDMOO_CONFIG_HPP
#define QDMOO_CONFIG_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qdmoo/metrics.hpp"
#include "qdmoo/objectives.hpp"
#include "qdmoo/optimize.hpp"
#include "qdmoo/problem.hpp"

namespace qdmoo {

/// Fully validated run configuration, loaded from a TOML file. Unknown
/// sections or keys are rejected with their key path before any compute.
struct RunConfig {
    // [problem]
    std::string benchmark = "linear_projection"; // linear_projection | toy_sphere
    int n = 1024;
    int d = 16;
    DescriptorFactor descriptor_factor = DescriptorFactor::Mean;
    double quality_offset = 0.0; // toy_sphere only

    // [objectives]
    int M = 10000;
    GridMethod grid_method = GridMethod::Sobol;
    std::uint64_t grid_seed = 42;
    double gamma_sq = 0.0; // 0 = auto (d/6 scaled by the mean squared range)
    std::string grid_file;

    // [scalarization]
    ScalarizationKind kind = ScalarizationKind::StchSet;
    double mu = 0.01;
    double mu_inner = 0.0; // 0 = same as mu
    double epsilon_ref = 0.1;
    StchForm eq13_form = StchForm::AppendixD;
    std::string lambda_mode = "uniform"; // uniform | file
    std::string lambda_file;

    // [optimizer]
    int K = 1024;
    int iterations = 1000;
    int batch_size = 64;
    double lr = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-8;
    std::uint64_t optimizer_seed = 7;
    int ref_refresh = 1;
    int solution_batch = 0;

    // [metrics]
    MetricsConfig metrics;
    int checkpoint_interval = 100;

    // [output]
    std::string output_directory = "runs/out";
    std::vector<std::string> output_formats = {"csv", "json"};

    static RunConfig from_toml_file(const std::string& path);
    static RunConfig from_toml_text(const std::string& text);

    void validate() const;

    /// Resolved kernel bandwidth (explicit value, or the auto default).
    double resolved_gamma_sq() const;

    std::unique_ptr<Problem> make_problem() const;
    BehaviorGrid make_grid(const Problem& problem) const;
    Weights make_lambda() const;
    OptimConfig make_optim_config() const;
    MetricsEngine make_metrics_engine(const Problem& problem) const;

    /// FNV-1a hash of the canonical compute-relevant serialization (the
    /// [output] section is excluded, so identical computations hash
    /// identically regardless of destination).
    std::string hash_hex() const;
    std::string canonical_string() const;
};

} // namespace qdmoo

#endif
