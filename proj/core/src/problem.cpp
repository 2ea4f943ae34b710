#include "qdmoo/problem.hpp"

#include <cmath>
#include <numbers>

namespace qdmoo {

namespace {

constexpr double kLpBound = 5.12;
constexpr double kLpShift = 2.048;

// Per-dimension shifted Rastrigin term and its derivative.
inline double rastrigin_term(double x)
{
    const double u = x - kLpShift;
    return u * u - 10.0 * std::cos(2.0 * std::numbers::pi * u) + 10.0;
}

inline double rastrigin_term_deriv(double x)
{
    const double u = x - kLpShift;
    return 2.0 * u + 20.0 * std::numbers::pi * std::sin(2.0 * std::numbers::pi * u);
}

// Per-dimension maximum of rastrigin_term over [-5.12, 5.12]: dense scan
// (>= 10^6 points) with golden-section refinement around the best bracket.
double lp_per_dim_max()
{
    constexpr int n_scan = 2'000'001;
    const double step = 2.0 * kLpBound / (n_scan - 1);
    double best_x = -kLpBound;
    double best_v = rastrigin_term(best_x);
    for (int i = 1; i < n_scan; ++i) {
        const double x = -kLpBound + i * step;
        const double v = rastrigin_term(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }

    double lo = std::max(-kLpBound, best_x - step);
    double hi = std::min(kLpBound, best_x + step);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = rastrigin_term(x1);
    double f2 = rastrigin_term(x2);
    while (hi - lo > 1e-13) {
        if (f1 < f2) { // keep the larger side (maximization)
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = rastrigin_term(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = rastrigin_term(x1);
        }
    }
    return std::max({best_v, f1, f2});
}

} // namespace

Bounds Bounds::uniform(int dim, double lower, double upper)
{
    Bounds b;
    b.lo = Eigen::VectorXd::Constant(dim, lower);
    b.hi = Eigen::VectorXd::Constant(dim, upper);
    b.validate();
    return b;
}

void Bounds::validate() const
{
    if (lo.size() != hi.size())
        throw ConfigError("Bounds: lo/hi size mismatch");
    if (lo.size() == 0)
        throw ConfigError("Bounds: empty");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (!(lo[i] <= hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
            throw ConfigError("Bounds: need finite lo <= hi in every dimension");
}

double Bounds::volume() const
{
    double v = 1.0;
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        v *= hi[i] - lo[i];
    return v;
}

bool Bounds::contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol) const
{
    if (x.size() != lo.size())
        return false;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x[i] < lo[i] - tol || x[i] > hi[i] + tol)
            return false;
    return true;
}

Eigen::VectorXd Bounds::clamp(const Eigen::Ref<const Eigen::VectorXd>& x) const
{
    return x.cwiseMax(lo).cwiseMin(hi);
}

void Bounds::clamp_rows(Eigen::Ref<Eigen::MatrixXd> rows) const
{
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
        rows.row(i) = rows.row(i).cwiseMax(lo.transpose()).cwiseMin(hi.transpose());
}

void ProblemSpec::validate() const
{
    if (n < 1 || d < 1 || n < d)
        throw ConfigError("ProblemSpec: need n >= d >= 1");
    solution_bounds.validate();
    behavior_bounds.validate();
    if (solution_bounds.dim() != n)
        throw ConfigError("ProblemSpec: solution_bounds dimension != n");
    if (behavior_bounds.dim() != d)
        throw ConfigError("ProblemSpec: behavior_bounds dimension != d");
}

std::pair<double, double> lp_clip(double x)
{
    if (x >= -kLpBound && x <= kLpBound)
        return {x, 1.0};
    return {kLpBound / x, -kLpBound / (x * x)};
}

double lp_max_rastrigin(int n)
{
    if (n < 1)
        throw ConfigError("lp_max_rastrigin: n must be >= 1");
    static const double per_dim = lp_per_dim_max();
    return per_dim * n;
}

double lp_objective(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> grad_f)
{
    const auto n = x.size();
    if (n < 1)
        throw ConfigError("lp_objective: empty input");
    if (!x.allFinite())
        throw EvalError("lp_objective: non-finite input component");
    const double max_r = lp_max_rastrigin(static_cast<int>(n));
    double r = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        r += rastrigin_term(x[i]);
        grad_f[i] = -100.0 / max_r * rastrigin_term_deriv(x[i]);
    }
    return 100.0 * (max_r - r) / max_r;
}

void lp_behavior(const Eigen::Ref<const Eigen::VectorXd>& x, int d, DescriptorFactor factor,
                 Eigen::Ref<Eigen::VectorXd> b, Eigen::Ref<Eigen::MatrixXd> jac_b)
{
    const int n = static_cast<int>(x.size());
    if (d < 1 || n % d != 0)
        throw ConfigError("lp_behavior: d must divide n (n=" + std::to_string(n)
                          + ", d=" + std::to_string(d) + ")");
    const int block = n / d;
    const double w = factor == DescriptorFactor::Mean ? 1.0 / block : 1.0 / d;
    jac_b.setZero();
    for (int k = 0; k < d; ++k) {
        double acc = 0.0;
        for (int i = k * block; i < (k + 1) * block; ++i) {
            auto [y, dy] = lp_clip(x[i]);
            acc += y;
            jac_b(k, i) = w * dy;
        }
        b[k] = w * acc;
    }
}

LinearProjection::LinearProjection(int n, int d, DescriptorFactor factor)
    : Problem([&] {
          if (d < 1 || n < d || n % d != 0)
              throw ConfigError("LinearProjection: need d >= 1 and d | n");
          ProblemSpec s;
          s.n = n;
          s.d = d;
          s.solution_bounds = Bounds::uniform(n, -kLpBound, kLpBound);
          const double reach = factor == DescriptorFactor::Mean
                                   ? kLpBound
                                   : kLpBound * static_cast<double>(n) / (static_cast<double>(d) * d);
          s.behavior_bounds = Bounds::uniform(d, -reach, reach);
          return s;
      }()),
      factor_(factor)
{
}

void LinearProjection::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x, Evaluation& out) const
{
    const int n = spec_.n;
    const int d = spec_.d;
    if (x.size() != n)
        throw ConfigError("LinearProjection: input dimension mismatch");
    out.grad_f.resize(n);
    out.b.resize(d);
    out.jac_b.resize(d, n);
    out.f = lp_objective(x, out.grad_f);
    lp_behavior(x, d, factor_, out.b, out.jac_b);
}

ToySphere::ToySphere(int n, int d, double quality_offset)
    : Problem([&] {
          ProblemSpec s;
          s.n = n;
          s.d = d;
          s.solution_bounds = Bounds::uniform(n, -1.0, 1.0);
          s.behavior_bounds = Bounds::uniform(d, -1.0, 1.0);
          return s;
      }()),
      offset_(quality_offset)
{
}

void ToySphere::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x, Evaluation& out) const
{
    const int n = spec_.n;
    const int d = spec_.d;
    if (x.size() != n)
        throw ConfigError("ToySphere: input dimension mismatch");
    if (!x.allFinite())
        throw EvalError("ToySphere: non-finite input component");
    out.f = offset_ - x.squaredNorm();
    out.grad_f = -2.0 * x;
    out.b = x.head(d);
    out.jac_b = Eigen::MatrixXd::Zero(d, n);
    out.jac_b.leftCols(d).setIdentity();
}

std::unique_ptr<Problem> toy_sphere_problem(int n, int d, double quality_offset)
{
    return std::make_unique<ToySphere>(n, d, quality_offset);
}

} // namespace qdmoo
