#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace gfnlab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Writable view of one matrix row (rows of column-major matrices are strided).
using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

// Raised when a NaN/Inf shows up in a forward or backward pass, or a loss
// goes non-finite. Aborts the run (exit code 2 at the CLI boundary); values
// are never silently clamped.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad run configuration or malformed input file (exit code 1 at the CLI).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Corrupted or incompatible checkpoint container.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Additive mask value for illegal actions. Large enough that exp(x + kMaskedLogit)
// underflows to exactly 0 in double, small enough to stay finite through the
// shifted-max log-softmax.
inline constexpr double kMaskedLogit = -1e30;

}  // namespace gfnlab
