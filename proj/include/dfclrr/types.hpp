#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dfclrr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Low-rank representation in factored form: value = basis * coeff,
/// basis has orthonormal columns.
struct LowRankFactor {
    Matrix basis;  // n x r'
    Matrix coeff;  // r' x l

    Index rows() const { return basis.rows(); }
    Index cols() const { return coeff.cols(); }
    Index rank() const { return basis.cols(); }
    Matrix dense() const { return basis * coeff; }
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace dfclrr
