#include "qdmoo/scalarize.hpp"

#include <cmath>
#include <limits>

namespace qdmoo {

void SmoothParams::validate() const
{
    if (!(mu > 0.0))
        throw ConfigError("SmoothParams: mu must be > 0");
    if (mu_inner && !(*mu_inner > 0.0))
        throw ConfigError("SmoothParams: mu_inner must be > 0");
}

void Weights::validate() const
{
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        if (!(lambda[i] >= 0.0))
            throw ConfigError("Weights: lambda must be nonnegative");
}

Eigen::VectorXd Weights::expand(int m) const
{
    if (uniform())
        return Eigen::VectorXd::Ones(m);
    if (lambda.size() != m)
        throw ConfigError("Weights: lambda length " + std::to_string(lambda.size())
                          + " does not match objective count " + std::to_string(m));
    validate();
    return lambda;
}

Weights Weights::slice(std::span<const int> rows) const
{
    if (uniform())
        return {};
    Weights out;
    out.lambda.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int r = rows[i];
        if (r < 0 || r >= lambda.size())
            throw ConfigError("Weights: slice index out of range");
        out.lambda[static_cast<Eigen::Index>(i)] = lambda[r];
    }
    return out;
}

ReferencePoint::ReferencePoint(int M, double eps)
    : z(Eigen::VectorXd::Zero(M)), initialized(static_cast<std::size_t>(M), 0), epsilon(eps)
{
    if (!(eps > 0.0))
        throw ConfigError("ReferencePoint: epsilon must be > 0");
}

bool ReferencePoint::covered(std::span<const int> rows) const
{
    for (int r : rows)
        if (r < 0 || r >= size() || !initialized[static_cast<std::size_t>(r)])
            return false;
    return true;
}

Eigen::VectorXd ReferencePoint::slice(std::span<const int> rows) const
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int r = rows[i];
        if (r < 0 || r >= size())
            throw EvalError("ReferencePoint: row " + std::to_string(r) + " out of range");
        if (!initialized[static_cast<std::size_t>(r)])
            throw EvalError("ReferencePoint: row " + std::to_string(r) + " not initialized");
        out[static_cast<Eigen::Index>(i)] = z[r];
    }
    return out;
}

void update_reference_point(ReferencePoint& ref, const Eigen::Ref<const Eigen::MatrixXd>& V,
                            std::span<const int> rows)
{
    if (V.rows() != static_cast<Eigen::Index>(rows.size()))
        throw ConfigError("update_reference_point: V rows / index count mismatch");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int r = rows[i];
        if (r < 0 || r >= ref.size())
            throw ConfigError("update_reference_point: row out of range");
        const double candidate = V.row(static_cast<Eigen::Index>(i)).minCoeff() - ref.epsilon;
        auto& init = ref.initialized[static_cast<std::size_t>(r)];
        if (!init || candidate < ref.z[r]) {
            ref.z[r] = candidate;
            init = 1;
        }
    }
}

namespace {

// Max-shifted log-sum-exp of a/mu: returns log sum exp((a_i - shift)/mu)
// and the shift.
struct Lse {
    double log_sum;
    double shift;
};

Lse lse_over(const Eigen::Ref<const Eigen::VectorXd>& a, double mu)
{
    const double shift = a.maxCoeff();
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        s += std::exp((a[i] - shift) / mu);
    return {std::log(s), shift};
}

} // namespace

double smooth_min(const Eigen::Ref<const Eigen::VectorXd>& values, double mu)
{
    if (values.size() == 0)
        throw ConfigError("smooth_min: empty input");
    if (!(mu > 0.0))
        throw ConfigError("smooth_min: mu must be > 0");
    const auto l = lse_over(-values, mu);
    return -(mu * l.log_sum + l.shift);
}

double smooth_max(const Eigen::Ref<const Eigen::VectorXd>& values, double mu)
{
    if (values.size() == 0)
        throw ConfigError("smooth_max: empty input");
    if (!(mu > 0.0))
        throw ConfigError("smooth_max: mu must be > 0");
    const auto l = lse_over(values, mu);
    return mu * l.log_sum + l.shift;
}

ScalarizationResult som_value(const Eigen::Ref<const Eigen::MatrixXd>& V, const Weights& w)
{
    const auto M = V.rows();
    const auto K = V.cols();
    if (M == 0 || K == 0)
        throw ConfigError("som_value: empty objective matrix");
    const Eigen::VectorXd lambda = w.expand(static_cast<int>(M));

    ScalarizationResult res;
    res.weight_matrix = Eigen::MatrixXd::Zero(M, K);
    for (Eigen::Index m = 0; m < M; ++m) {
        Eigen::Index kmin = 0;
        V.row(m).minCoeff(&kmin); // Eigen returns the first index on ties
        res.value += lambda[m] * V(m, kmin);
        res.weight_matrix(m, kmin) = lambda[m];
    }
    return res;
}

ScalarizationResult tch_set_value(const Eigen::Ref<const Eigen::MatrixXd>& V,
                                  const Eigen::Ref<const Eigen::VectorXd>& z, const Weights& w)
{
    const auto M = V.rows();
    const auto K = V.cols();
    if (M == 0 || K == 0)
        throw ConfigError("tch_set_value: empty objective matrix");
    if (z.size() != M)
        throw ConfigError("tch_set_value: reference point does not cover the batch");
    const Eigen::VectorXd lambda = w.expand(static_cast<int>(M));

    double best = -std::numeric_limits<double>::infinity();
    Eigen::Index best_m = 0;
    Eigen::Index best_k = 0;
    for (Eigen::Index m = 0; m < M; ++m) {
        Eigen::Index kmin = 0;
        const double row_min = V.row(m).minCoeff(&kmin);
        const double g = lambda[m] * (row_min - z[m]);
        if (g > best) { // strict: first index wins on ties
            best = g;
            best_m = m;
            best_k = kmin;
        }
    }
    ScalarizationResult res;
    res.value = best;
    res.weight_matrix = Eigen::MatrixXd::Zero(M, K);
    res.weight_matrix(best_m, best_k) = lambda[best_m];
    return res;
}

ScalarizationResult ssom_value(const Eigen::Ref<const Eigen::MatrixXd>& V, const SmoothParams& sp,
                               const Weights& w)
{
    sp.validate();
    const auto M = V.rows();
    const auto K = V.cols();
    if (M == 0 || K == 0)
        throw ConfigError("ssom_value: empty objective matrix");
    const Eigen::VectorXd lambda = w.expand(static_cast<int>(M));
    const double mu = sp.mu;

    ScalarizationResult res;
    res.weight_matrix.resize(M, K);
    for (Eigen::Index m = 0; m < M; ++m) {
        const double row_min = V.row(m).minCoeff();
        double s = 0.0;
        for (Eigen::Index k = 0; k < K; ++k) {
            const double e = std::exp(-(V(m, k) - row_min) / mu);
            res.weight_matrix(m, k) = e;
            s += e;
        }
        res.value += lambda[m] * (row_min - mu * std::log(s));
        res.weight_matrix.row(m) *= lambda[m] / s; // softmin weights, row sums to lambda_m
    }
    return res;
}

std::string stch_form_name(StchForm f)
{
    return f == StchForm::AppendixD ? "appendix-d" : "printed-eq13";
}

StchForm stch_form_from_name(const std::string& name)
{
    if (name == "appendix-d")
        return StchForm::AppendixD;
    if (name == "printed-eq13")
        return StchForm::PrintedEq13;
    throw ConfigError("unknown eq13 form '" + name + "' (expected appendix-d|printed-eq13)");
}

ScalarizationResult stch_set_value(const Eigen::Ref<const Eigen::MatrixXd>& V,
                                   const Eigen::Ref<const Eigen::VectorXd>& z,
                                   const SmoothParams& sp, const Weights& w, StchForm form)
{
    sp.validate();
    const auto M = V.rows();
    const auto K = V.cols();
    if (M == 0 || K == 0)
        throw ConfigError("stch_set_value: empty objective matrix");
    if (z.size() != M)
        throw ConfigError("stch_set_value: reference point does not cover the batch");
    const Eigen::VectorXd lambda = w.expand(static_cast<int>(M));
    const double mu = sp.mu;
    const double mu_in = sp.inner();

    // Inner smooth minimum per objective and its softmin weights.
    Eigen::VectorXd smin(M);
    Eigen::MatrixXd inner_w(M, K);
    for (Eigen::Index m = 0; m < M; ++m) {
        const double row_min = V.row(m).minCoeff();
        double s = 0.0;
        for (Eigen::Index k = 0; k < K; ++k) {
            const double e = std::exp(-(V(m, k) - row_min) / mu_in);
            inner_w(m, k) = e;
            s += e;
        }
        smin[m] = row_min - mu_in * std::log(s);
        inner_w.row(m) /= s;
    }

    // Outer exponent: AppendixD divides the reference point by mu as the
    // generalized derivation implies; PrintedEq13 leaves z unscaled.
    Eigen::VectorXd expo(M);
    for (Eigen::Index m = 0; m < M; ++m) {
        expo[m] = form == StchForm::AppendixD ? lambda[m] * (smin[m] - z[m]) / mu
                                              : lambda[m] * smin[m] / mu - z[m];
    }

    const double shift = expo.maxCoeff();
    Eigen::VectorXd outer_w(M);
    double s = 0.0;
    for (Eigen::Index m = 0; m < M; ++m) {
        outer_w[m] = std::exp(expo[m] - shift);
        s += outer_w[m];
    }
    outer_w /= s;

    ScalarizationResult res;
    res.value = mu * (std::log(s) + shift);
    res.weight_matrix = (outer_w.cwiseProduct(lambda)).asDiagonal() * inner_w;
    return res;
}

SquadResult squad_value(const std::vector<Evaluation>& evals, double gamma_sq)
{
    if (evals.empty())
        throw ConfigError("squad_value: empty solution set");
    if (!(gamma_sq > 0.0))
        throw ConfigError("squad_value: gamma_sq must be > 0");
    const int K = static_cast<int>(evals.size());
    const int n = static_cast<int>(evals.front().grad_f.size());
    const int d = static_cast<int>(evals.front().b.size());

    for (int i = 0; i < K; ++i)
        if (evals[static_cast<std::size_t>(i)].f < 0.0)
            throw EvalError("squad_value: negative quality f(x^(" + std::to_string(i)
                            + ")) = " + fmt_g17(evals[static_cast<std::size_t>(i)].f)
                            + "; sqrt(f_i f_j) is undefined - shift or clamp the quality");

    SquadResult res;
    res.grads = Eigen::MatrixXd::Zero(K, n);
    // quality term and its gradient
    std::vector<double> quality_coeff(static_cast<std::size_t>(K), 1.0);
    Eigen::MatrixXd repulsion_dir = Eigen::MatrixXd::Zero(K, d); // accumulates in behavior space
    for (int i = 0; i < K; ++i)
        res.value += evals[static_cast<std::size_t>(i)].f;

    for (int i = 0; i < K; ++i) {
        const Evaluation& ei = evals[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < K; ++j) {
            const Evaluation& ej = evals[static_cast<std::size_t>(j)];
            const Eigen::VectorXd diff = ei.b - ej.b;
            const double kern = std::exp(-diff.squaredNorm() / gamma_sq);
            const double geo = std::sqrt(ei.f * ej.f);
            res.value -= geo * kern;
            // d/df_i of sqrt(f_i f_j) = 0.5 sqrt(f_j / f_i); zero-quality
            // pairs contribute nothing to the value, take the 0 subgradient.
            if (geo > 0.0) {
                quality_coeff[static_cast<std::size_t>(i)] -= 0.5 * (ej.f / geo) * kern;
                quality_coeff[static_cast<std::size_t>(j)] -= 0.5 * (ei.f / geo) * kern;
            }
            // d/db_i of -geo * kern = geo * kern * (2/gamma_sq) (b_i - b_j)
            const double c = geo * kern * 2.0 / gamma_sq;
            repulsion_dir.row(i) += c * diff.transpose();
            repulsion_dir.row(j) -= c * diff.transpose();
        }
    }
    for (int i = 0; i < K; ++i) {
        const Evaluation& ei = evals[static_cast<std::size_t>(i)];
        res.grads.row(i) = quality_coeff[static_cast<std::size_t>(i)] * ei.grad_f.transpose()
                           + repulsion_dir.row(i) * ei.jac_b;
    }
    return res;
}

} // namespace qdmoo
