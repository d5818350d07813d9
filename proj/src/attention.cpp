#include "vta/attention.hpp"

#include <cmath>
#include <stdexcept>

#include "vta/kernels.hpp"
#include "vta/rng.hpp"

namespace vta {

namespace {

constexpr double kLnEps = 1e-5;

void layer_norm_rows(Matrix& m, const std::vector<float>& gamma, const std::vector<float>& beta) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m.rows; ++i) {
        float* row = m.row(i);
        double mean = 0.0;
        for (int j = 0; j < m.cols; ++j) mean += row[j];
        mean /= m.cols;
        double var = 0.0;
        for (int j = 0; j < m.cols; ++j) {
            const double d = row[j] - mean;
            var += d * d;
        }
        var /= m.cols;
        const double inv = 1.0 / std::sqrt(var + kLnEps);
        for (int j = 0; j < m.cols; ++j)
            row[j] = static_cast<float>((row[j] - mean) * inv) * gamma[j] + beta[j];
    }
}

float gelu(float x) {
    const double xd = x;
    return static_cast<float>(
        0.5 * xd * (1.0 + std::tanh(0.7978845608028654 * (xd + 0.044715 * xd * xd * xd))));
}

// Self-attention over one contiguous sequence (n x D). Returns the residual
// update in `out`, the projected keys in `keys` (n x D, heads concatenated)
// and the head-averaged attention matrix in `attn` (n x n). Runs serially;
// callers parallelize across sequences.
void mhsa_seq(const Matrix& x, const AttnSublayerWeights& w, int heads, Matrix& out, Matrix& keys,
              Matrix& attn) {
    const int n = x.rows;
    const int dim = x.cols;
    const int dh = dim / heads;
    const float scale = std::sqrt(static_cast<float>(dh));

    Matrix xn = x;
    layer_norm_rows(xn, w.ln_gamma, w.ln_beta);
    const Matrix q = serial::matmul(xn, w.wq);
    keys = serial::matmul(xn, w.wk);
    const Matrix v = serial::matmul(xn, w.wv);

    Matrix concat(n, dim);
    attn = Matrix(n, n);
    Matrix scores(n, n);
    for (int h = 0; h < heads; ++h) {
        const int off = h * dh;
        for (int i = 0; i < n; ++i) {
            const float* qi = q.row(i) + off;
            float* srow = scores.row(i);
            for (int j = 0; j < n; ++j) {
                const float* kj = keys.row(j) + off;
                double dot = 0.0;
                for (int d = 0; d < dh; ++d) dot += static_cast<double>(qi[d]) * kj[d];
                srow[j] = static_cast<float>(dot);
            }
        }
        const Matrix sm = serial::softmax_rows(scores, scale);
        for (int i = 0; i < n; ++i) {
            const float* smi = sm.row(i);
            float* arow = attn.row(i);
            float* crow = concat.row(i) + off;
            for (int j = 0; j < n; ++j) arow[j] += smi[j] / heads;
            for (int d = 0; d < dh; ++d) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j)
                    acc += static_cast<double>(smi[j]) * (v.row(j) + off)[d];
                crow[d] = static_cast<float>(acc);
            }
        }
    }
    out = serial::matmul(concat, w.wo);
}

Matrix seeded_matrix(int rows, int cols, float scale, std::mt19937& g) {
    Matrix m(rows, cols);
    for (float& v : m.data) v = scale * normal_float(g);
    return m;
}

}  // namespace

BlockWeights BlockWeights::seeded(int dim, int heads, std::mt19937& g) {
    if (heads <= 0 || dim % heads != 0)
        throw std::invalid_argument("BlockWeights: heads must divide dim");
    const float scale = 0.02f;
    BlockWeights w;
    w.dim = dim;
    w.heads = heads;
    for (AttnSublayerWeights* sub : {&w.temporal, &w.spatial}) {
        sub->wq = seeded_matrix(dim, dim, scale, g);
        sub->wk = seeded_matrix(dim, dim, scale, g);
        sub->wv = seeded_matrix(dim, dim, scale, g);
        sub->wo = seeded_matrix(dim, dim, scale, g);
        sub->ln_gamma.assign(dim, 1.0f);
        sub->ln_beta.assign(dim, 0.0f);
    }
    w.ffn.w1 = seeded_matrix(dim, 4 * dim, scale, g);
    w.ffn.w2 = seeded_matrix(4 * dim, dim, scale, g);
    w.ffn.ln_gamma.assign(dim, 1.0f);
    w.ffn.ln_beta.assign(dim, 0.0f);
    return w;
}

BlockWeights BlockWeights::zeros(int dim, int heads) {
    if (heads <= 0 || dim % heads != 0)
        throw std::invalid_argument("BlockWeights: heads must divide dim");
    BlockWeights w;
    w.dim = dim;
    w.heads = heads;
    for (AttnSublayerWeights* sub : {&w.temporal, &w.spatial}) {
        sub->wq = Matrix(dim, dim);
        sub->wk = Matrix(dim, dim);
        sub->wv = Matrix(dim, dim);
        sub->wo = Matrix(dim, dim);
        sub->ln_gamma.assign(dim, 1.0f);
        sub->ln_beta.assign(dim, 0.0f);
    }
    w.ffn.w1 = Matrix(dim, 4 * dim);
    w.ffn.w2 = Matrix(4 * dim, dim);
    w.ffn.ln_gamma.assign(dim, 1.0f);
    w.ffn.ln_beta.assign(dim, 0.0f);
    return w;
}

AttnStats temporal_attention(TokenGrid& grid, const BlockWeights& w) {
    const int T = grid.frames;
    const int L = grid.patches;
    const int D = grid.dim;

    std::vector<Matrix> key_buf(L);   // per position: T x D
    std::vector<Matrix> attn_buf(L);  // per position: T x T

#pragma omp parallel for schedule(static)
    for (int l = 0; l < L; ++l) {
        Matrix x(T, D);
        for (int t = 0; t < T; ++t)
            std::copy(grid.feat(t, l), grid.feat(t, l) + D, x.row(t));
        Matrix upd, keys, attn;
        mhsa_seq(x, w.temporal, w.heads, upd, keys, attn);
        for (int t = 0; t < T; ++t) {
            float* f = grid.feat(t, l);
            const float* u = upd.row(t);
            for (int d = 0; d < D; ++d) f[d] += u[d];
        }
        key_buf[l] = std::move(keys);
        attn_buf[l] = std::move(attn);
    }

    // Frame-level stats: keys are the token_size-weighted mean over positions,
    // attention the plain mean. Reduced serially in fixed order.
    AttnStats stats;
    stats.keys = Matrix(T, D);
    stats.attn = Matrix(T, T);
    for (int t = 0; t < T; ++t) {
        std::vector<double> acc(D, 0.0);
        double wsum = 0.0;
        for (int l = 0; l < L; ++l) {
            const double sz = grid.size_of(t, l);
            wsum += sz;
            const float* kr = key_buf[l].row(t);
            for (int d = 0; d < D; ++d) acc[d] += sz * kr[d];
        }
        for (int d = 0; d < D; ++d) stats.keys.at(t, d) = static_cast<float>(acc[d] / wsum);
    }
    for (int i = 0; i < T; ++i) {
        for (int j = 0; j < T; ++j) {
            double acc = 0.0;
            for (int l = 0; l < L; ++l) acc += attn_buf[l].at(i, j);
            stats.attn.at(i, j) = static_cast<float>(acc / L);
        }
    }
    return stats;
}

AttnStats spatial_attention(TokenGrid& grid, const BlockWeights& w, bool per_frame_stats) {
    const int T = grid.frames;
    const int L = grid.patches;
    const int D = grid.dim;

    std::vector<Matrix> key_buf(T);   // per frame: L x D (cls dropped)
    std::vector<Matrix> attn_buf(T);  // per frame: L x L (cls row/col dropped)
    Matrix cls_out(T, D);

#pragma omp parallel for schedule(static)
    for (int t = 0; t < T; ++t) {
        Matrix x(L + 1, D);
        std::copy(grid.cls.begin(), grid.cls.end(), x.row(0));
        for (int l = 0; l < L; ++l)
            std::copy(grid.feat(t, l), grid.feat(t, l) + D, x.row(l + 1));
        Matrix upd, keys, attn;
        mhsa_seq(x, w.spatial, w.heads, upd, keys, attn);
        for (int l = 0; l < L; ++l) {
            float* f = grid.feat(t, l);
            const float* u = upd.row(l + 1);
            for (int d = 0; d < D; ++d) f[d] += u[d];
        }
        for (int d = 0; d < D; ++d) cls_out.at(t, d) = grid.cls[d] + upd.at(0, d);
        Matrix k(L, D);
        for (int l = 0; l < L; ++l) std::copy(keys.row(l + 1), keys.row(l + 1) + D, k.row(l));
        Matrix a(L, L);
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < L; ++j) a.at(i, j) = attn.at(i + 1, j + 1);
        key_buf[t] = std::move(k);
        attn_buf[t] = std::move(a);
    }

    for (int d = 0; d < D; ++d) {
        double acc = 0.0;
        for (int t = 0; t < T; ++t) acc += cls_out.at(t, d);
        grid.cls[d] = static_cast<float>(acc / T);
    }

    AttnStats stats;
    stats.keys = Matrix(L, D);
    stats.attn = Matrix(L, L);
    for (int l = 0; l < L; ++l) {
        for (int d = 0; d < D; ++d) {
            double acc = 0.0;
            for (int t = 0; t < T; ++t) acc += key_buf[t].at(l, d);
            stats.keys.at(l, d) = static_cast<float>(acc / T);
        }
    }
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            double acc = 0.0;
            for (int t = 0; t < T; ++t) acc += attn_buf[t].at(i, j);
            stats.attn.at(i, j) = static_cast<float>(acc / T);
        }
    }
    if (per_frame_stats) {
        stats.keys_per_frame = std::move(key_buf);
        stats.attn_per_frame = std::move(attn_buf);
    }
    return stats;
}

void feed_forward(TokenGrid& grid, const BlockWeights& w) {
    const int n = grid.frames * grid.patches + 1;  // all tokens plus cls
    const int D = grid.dim;
    Matrix x(n, D);
    std::copy(grid.features.begin(), grid.features.end(), x.data.begin());
    std::copy(grid.cls.begin(), grid.cls.end(), x.row(n - 1));

    Matrix xn = x;
    layer_norm_rows(xn, w.ffn.ln_gamma, w.ffn.ln_beta);
    Matrix h = matmul(xn, w.ffn.w1);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < h.rows; ++i) {
        float* row = h.row(i);
        for (int j = 0; j < h.cols; ++j) row[j] = gelu(row[j]);
    }
    const Matrix upd = matmul(h, w.ffn.w2);

    for (size_t i = 0; i < grid.features.size(); ++i) grid.features[i] += upd.data[i];
    const float* cu = upd.row(n - 1);
    for (int d = 0; d < D; ++d) grid.cls[d] += cu[d];
}

}  // namespace vta
