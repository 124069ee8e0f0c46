#pragma once

#include <span>

namespace gff {

/// In-place orthonormal two-dimensional DST-I on a rows x cols row-major
/// array. The transform is symmetric and its own inverse; its basis vectors
/// sqrt(2/(m+1)) sin(pi k i / (m+1)) are the eigenvectors of the simple
/// random walk killed on the boundary of a rows x cols interior.
void orthonormal_dst2(std::span<double> data, int rows, int cols);

/// Eigenvalue of the killed walk kernel for mode (k, l), 1 <= k <= rows, 1 <= l <= cols.
double walk_eigenvalue(int k, int l, int rows, int cols);

} // namespace gff
