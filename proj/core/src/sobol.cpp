#include "qdmoo/sobol.hpp"

#include <bit>
#include <cassert>

namespace qdmoo {

namespace {

// Primitive-polynomial degree, coefficient bits and initial direction
// numbers (Joe-Kuo style) for dimensions 2..21; dimension 1 is the van der
// Corput sequence in base 2.
struct DimInit {
    int s;
    std::uint32_t a;
    std::uint32_t m[7];
};

constexpr DimInit kDims[] = {
    {1, 0, {1, 0, 0, 0, 0, 0, 0}},
    {2, 1, {1, 3, 0, 0, 0, 0, 0}},
    {3, 1, {1, 3, 1, 0, 0, 0, 0}},
    {3, 2, {1, 1, 1, 0, 0, 0, 0}},
    {4, 1, {1, 1, 3, 3, 0, 0, 0}},
    {4, 4, {1, 3, 5, 13, 0, 0, 0}},
    {5, 2, {1, 1, 5, 5, 17, 0, 0}},
    {5, 4, {1, 1, 5, 5, 5, 0, 0}},
    {5, 7, {1, 1, 7, 11, 19, 0, 0}},
    {5, 11, {1, 1, 5, 1, 1, 0, 0}},
    {5, 13, {1, 1, 1, 3, 11, 0, 0}},
    {5, 14, {1, 3, 5, 5, 31, 0, 0}},
    {6, 1, {1, 3, 3, 9, 7, 49, 0}},
    {6, 13, {1, 1, 1, 15, 21, 21, 0}},
    {6, 16, {1, 3, 1, 13, 27, 49, 0}},
    {6, 19, {1, 1, 1, 15, 7, 5, 0}},
    {6, 22, {1, 3, 1, 15, 13, 25, 0}},
    {6, 25, {1, 1, 5, 5, 19, 61, 0}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
};

} // namespace

SobolSequence::SobolSequence(int dim) : dim_(dim)
{
    if (dim < 1 || dim > kMaxDim)
        throw ConfigError("SobolSequence: dimension must be in [1, "
                          + std::to_string(kMaxDim) + "], got " + std::to_string(dim));

    directions_.assign(static_cast<std::size_t>(dim_) * kMaxBits, 0);
    state_.assign(static_cast<std::size_t>(dim_), 0);

    // Dimension 1: V_k = 2^(kMaxBits - k).
    for (int k = 1; k <= kMaxBits; ++k)
        directions_[static_cast<std::size_t>(k - 1)] = 1u << (kMaxBits - k);

    for (int j = 2; j <= dim_; ++j) {
        const DimInit& init = kDims[j - 2];
        const int s = init.s;
        std::uint32_t m[kMaxBits + 1];
        for (int k = 1; k <= s; ++k) {
            m[k] = init.m[k - 1];
            assert((m[k] & 1u) == 1u && m[k] < (1u << k) && "bad initial direction number");
        }
        for (int k = s + 1; k <= kMaxBits; ++k) {
            m[k] = m[k - s] ^ (m[k - s] << s);
            for (int i = 1; i <= s - 1; ++i)
                if ((init.a >> (s - 1 - i)) & 1u)
                    m[k] ^= m[k - i] << i;
        }
        auto* v = &directions_[static_cast<std::size_t>(j - 1) * kMaxBits];
        for (int k = 1; k <= kMaxBits; ++k)
            v[k - 1] = m[k] << (kMaxBits - k);
    }

    // Advance past the all-zeros index-0 point.
    index_ = 1;
    for (int j = 0; j < dim_; ++j)
        state_[static_cast<std::size_t>(j)] = directions_[static_cast<std::size_t>(j) * kMaxBits];
}

Eigen::VectorXd SobolSequence::next()
{
    constexpr double fac = 1.0 / 4294967296.0; // 2^-32
    Eigen::VectorXd p(dim_);
    for (int j = 0; j < dim_; ++j)
        p[j] = static_cast<double>(state_[static_cast<std::size_t>(j)]) * fac;

    // Gray-code update: flip the direction number of the lowest zero bit.
    const int c = std::countr_one(index_);
    if (c >= kMaxBits)
        throw EvalError("SobolSequence: sequence exhausted (2^32 points)");
    for (int j = 0; j < dim_; ++j)
        state_[static_cast<std::size_t>(j)] ^=
            directions_[static_cast<std::size_t>(j) * kMaxBits + static_cast<std::size_t>(c)];
    ++index_;
    return p;
}

Eigen::MatrixXd SobolSequence::generate(int n)
{
    Eigen::MatrixXd pts(n, dim_);
    for (int i = 0; i < n; ++i)
        pts.row(i) = next().transpose();
    return pts;
}

} // namespace qdmoo
