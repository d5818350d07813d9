#include "vta/kernels.hpp"

#include <cmath>
#include <cstdint>

namespace vta {

namespace {

void check_matmul_shapes(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw std::invalid_argument("matmul: shape mismatch " + shape_str(a) + " x " +
                                    shape_str(b));
}

void check_finite(const Matrix& m, const char* who) {
    for (float v : m.data)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": non-finite input");
}

// One output row of a*b: acc[j] over k in fixed order, double accumulation.
// Shared by the parallel and serial paths so they match bit for bit.
inline void matmul_row(const Matrix& a, const Matrix& b, int i, double* acc, float* out) {
    for (int j = 0; j < b.cols; ++j) acc[j] = 0.0;
    const float* arow = a.row(i);
    for (int k = 0; k < a.cols; ++k) {
        const double aik = arow[k];
        const float* brow = b.row(k);
        for (int j = 0; j < b.cols; ++j) acc[j] += aik * static_cast<double>(brow[j]);
    }
    for (int j = 0; j < b.cols; ++j) out[j] = static_cast<float>(acc[j]);
}

inline void softmax_row(const float* in, float* out, int n, float scale) {
    float mx = in[0];
    for (int j = 1; j < n; ++j) mx = in[j] > mx ? in[j] : mx;
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
        const double e = std::exp(static_cast<double>(in[j] - mx) / scale);
        out[j] = static_cast<float>(e);
        sum += e;
    }
    const double inv = 1.0 / sum;
    for (int j = 0; j < n; ++j) out[j] = static_cast<float>(out[j] * inv);
}

inline double row_norm(const float* v, int n) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += static_cast<double>(v[j]) * v[j];
    return std::sqrt(s);
}

inline void cosine_row(const Matrix& x, const Matrix& y, const std::vector<double>& ynorm, int i,
                       float* out) {
    const float* xi = x.row(i);
    const double nx = row_norm(xi, x.cols);
    for (int j = 0; j < y.rows; ++j) {
        const double denom = nx * ynorm[j];
        if (denom == 0.0) {
            out[j] = 0.0f;  // zero-norm convention
            continue;
        }
        const float* yj = y.row(j);
        double dot = 0.0;
        for (int k = 0; k < x.cols; ++k) dot += static_cast<double>(xi[k]) * yj[k];
        out[j] = static_cast<float>(dot / denom);
    }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_matmul_shapes(a, b);
    Matrix out(a.rows, b.cols);
#pragma omp parallel
    {
        std::vector<double> acc(b.cols);
#pragma omp for schedule(static)
        for (int i = 0; i < a.rows; ++i) matmul_row(a, b, i, acc.data(), out.row(i));
    }
    return out;
}

Matrix softmax_rows(const Matrix& m, float scale) {
    if (!(scale > 0.0f)) throw std::invalid_argument("softmax_rows: scale must be > 0");
    check_finite(m, "softmax_rows");
    Matrix out(m.rows, m.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m.rows; ++i) softmax_row(m.row(i), out.row(i), m.cols, scale);
    return out;
}

Matrix cosine_sim_matrix(const Matrix& x, const Matrix& y) {
    if (x.cols != y.cols)
        throw std::invalid_argument("cosine_sim_matrix: column mismatch " + shape_str(x) +
                                    " vs " + shape_str(y));
    std::vector<double> ynorm(y.rows);
    for (int j = 0; j < y.rows; ++j) ynorm[j] = row_norm(y.row(j), y.cols);
    Matrix out(x.rows, y.rows);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < x.rows; ++i) cosine_row(x, y, ynorm, i, out.row(i));
    return out;
}

void weighted_mean_rows(const float* const* rows, const float* weights, int n, int dim,
                        float* out) {
    std::vector<double> acc(dim, 0.0);
    double wsum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = weights[i];
        wsum += w;
        for (int d = 0; d < dim; ++d) acc[d] += w * static_cast<double>(rows[i][d]);
    }
    for (int d = 0; d < dim; ++d) out[d] = static_cast<float>(acc[d] / wsum);
}

std::vector<float> weighted_mean(std::span<const std::vector<float>> values,
                                 std::span<const float> weights) {
    if (values.empty()) throw std::invalid_argument("weighted_mean: empty input");
    if (values.size() != weights.size())
        throw std::invalid_argument("weighted_mean: values/weights length mismatch");
    const size_t dim = values[0].size();
    for (const auto& v : values)
        if (v.size() != dim) throw std::invalid_argument("weighted_mean: ragged values");
    for (float w : weights)
        if (!(w > 0.0f)) throw std::invalid_argument("weighted_mean: weights must be > 0");

    std::vector<const float*> rows(values.size());
    for (size_t i = 0; i < values.size(); ++i) rows[i] = values[i].data();
    std::vector<float> out(dim);
    weighted_mean_rows(rows.data(), weights.data(), static_cast<int>(values.size()),
                       static_cast<int>(dim), out.data());
    return out;
}

}  // namespace vta
