#pragma once

#include <span>
#include <vector>

#include "vta/matrix.hpp"

namespace vta {

// Production kernels. Parallelized with OpenMP across independent output
// rows; each output element is computed by a single thread with a fixed
// summation order, so results are bit-identical for any thread count and
// equal to the serial reference below.

// Standard matrix product. Throws std::invalid_argument on a.cols != b.rows.
Matrix matmul(const Matrix& a, const Matrix& b);

// Row-wise softmax of m/scale, stabilized by row-max subtraction.
// scale must be > 0. Throws std::invalid_argument on non-finite input.
Matrix softmax_rows(const Matrix& m, float scale);

// out[i][j] = <x_i, y_j> / (|x_i||y_j|). Rows with zero norm yield 0.
// Requires x.cols == y.cols.
Matrix cosine_sim_matrix(const Matrix& x, const Matrix& y);

// sum_i w_i v_i / sum_i w_i. Throws on empty input, length mismatch, or
// non-positive weights.
std::vector<float> weighted_mean(std::span<const std::vector<float>> values,
                                 std::span<const float> weights);

// Pointer core of weighted_mean, used by the merge kernels: accumulates n
// rows of width dim into out (not normalized until the end).
void weighted_mean_rows(const float* const* rows, const float* weights, int n, int dim,
                        float* out);

namespace serial {

// Reference implementations: plain loops, no OpenMP. Kept for tests and the
// benchmark target; must produce bit-identical results to the kernels above.
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix softmax_rows(const Matrix& m, float scale);
Matrix cosine_sim_matrix(const Matrix& x, const Matrix& y);
std::vector<float> weighted_mean(std::span<const std::vector<float>> values,
                                 std::span<const float> weights);

}  // namespace serial

}  // namespace vta
