// Serial reference kernels. Deliberately written as plain loops, independent
// of the OpenMP path in kernels.cpp; tests assert the two produce identical
// bits. Accumulation is 64-bit in k-ascending order, same contract as the
// production kernels.

#include <cmath>

#include "vta/kernels.hpp"

namespace vta::serial {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw std::invalid_argument("matmul: shape mismatch " + shape_str(a) + " x " +
                                    shape_str(b));
    Matrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < b.cols; ++j) {
            double acc = 0.0;
            for (int k = 0; k < a.cols; ++k)
                acc += static_cast<double>(a.at(i, k)) * static_cast<double>(b.at(k, j));
            out.at(i, j) = static_cast<float>(acc);
        }
    }
    return out;
}

Matrix softmax_rows(const Matrix& m, float scale) {
    if (!(scale > 0.0f)) throw std::invalid_argument("softmax_rows: scale must be > 0");
    for (float v : m.data)
        if (!std::isfinite(v)) throw std::invalid_argument("softmax_rows: non-finite input");
    Matrix out(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i) {
        float mx = m.at(i, 0);
        for (int j = 1; j < m.cols; ++j) mx = std::max(mx, m.at(i, j));
        double sum = 0.0;
        for (int j = 0; j < m.cols; ++j) {
            const double e = std::exp(static_cast<double>(m.at(i, j) - mx) / scale);
            out.at(i, j) = static_cast<float>(e);
            sum += e;
        }
        const double inv = 1.0 / sum;
        for (int j = 0; j < m.cols; ++j)
            out.at(i, j) = static_cast<float>(out.at(i, j) * inv);
    }
    return out;
}

Matrix cosine_sim_matrix(const Matrix& x, const Matrix& y) {
    if (x.cols != y.cols)
        throw std::invalid_argument("cosine_sim_matrix: column mismatch " + shape_str(x) +
                                    " vs " + shape_str(y));
    auto norm = [](const Matrix& m, int r) {
        double s = 0.0;
        for (int k = 0; k < m.cols; ++k) s += static_cast<double>(m.at(r, k)) * m.at(r, k);
        return std::sqrt(s);
    };
    Matrix out(x.rows, y.rows);
    for (int i = 0; i < x.rows; ++i) {
        const double nx = norm(x, i);
        for (int j = 0; j < y.rows; ++j) {
            const double denom = nx * norm(y, j);
            if (denom == 0.0) {
                out.at(i, j) = 0.0f;
                continue;
            }
            double dot = 0.0;
            for (int k = 0; k < x.cols; ++k)
                dot += static_cast<double>(x.at(i, k)) * y.at(j, k);
            out.at(i, j) = static_cast<float>(dot / denom);
        }
    }
    return out;
}

std::vector<float> weighted_mean(std::span<const std::vector<float>> values,
                                 std::span<const float> weights) {
    if (values.empty()) throw std::invalid_argument("weighted_mean: empty input");
    if (values.size() != weights.size())
        throw std::invalid_argument("weighted_mean: values/weights length mismatch");
    const size_t dim = values[0].size();
    std::vector<double> acc(dim, 0.0);
    double wsum = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        if (values[i].size() != dim) throw std::invalid_argument("weighted_mean: ragged values");
        if (!(weights[i] > 0.0f)) throw std::invalid_argument("weighted_mean: weights must be > 0");
        wsum += weights[i];
        for (size_t d = 0; d < dim; ++d)
            acc[d] += static_cast<double>(weights[i]) * values[i][d];
    }
    std::vector<float> out(dim);
    for (size_t d = 0; d < dim; ++d) out[d] = static_cast<float>(acc[d] / wsum);
    return out;
}

}  // namespace vta::serial
