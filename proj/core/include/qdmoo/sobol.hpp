#ifndef QDMOO_SOBOL_HPP
#define QDMOO_SOBOL_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "qdmoo/common.hpp"

namespace qdmoo {

/// Gray-code Sobol sequence on [0,1)^dim, dimensions 1..21 (direction
/// numbers from the standard primitive-polynomial tables). The all-zeros
/// index-0 point is skipped, so the first point returned is the cube
/// center (0.5, ..., 0.5).
class SobolSequence {
public:
    static constexpr int kMaxDim = 21;
    static constexpr int kMaxBits = 32;

    explicit SobolSequence(int dim);

    int dim() const { return dim_; }

    /// Next point of the sequence (row vector of length dim).
    Eigen::VectorXd next();

    /// Generate n points as an n x dim matrix.
    Eigen::MatrixXd generate(int n);

private:
    int dim_;
    std::uint64_t index_ = 0;                 // raw sequence index of state_
    std::vector<std::uint32_t> state_;        // current X_i per dimension
    std::vector<std::uint32_t> directions_;   // dim * kMaxBits direction numbers
};

} // namespace qdmoo

#endif
