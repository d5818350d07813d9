#include <cmath>

#include "doctest.h"
#include "test_helpers.hpp"
#include "vta/kernels.hpp"

using namespace vta;

TEST_SUITE_BEGIN("kernels");

TEST_CASE("matmul identity and hand arithmetic") {
    const Matrix id(2, 2, {1, 0, 0, 1});
    const Matrix b(2, 2, {3, 4, 5, 6});
    const Matrix out = matmul(id, b);
    CHECK(out.data == b.data);

    const Matrix a(1, 2, {1, 2});
    const Matrix c(2, 1, {3, 4});
    CHECK(matmul(a, c).at(0, 0) == doctest::Approx(11.0));
}

TEST_CASE("matmul shape mismatch throws") {
    const Matrix a(2, 3);
    const Matrix b(4, 2);
    CHECK_THROWS_AS(matmul(a, b), std::invalid_argument);
}

TEST_CASE("softmax analytic rows") {
    const Matrix m(2, 2, {0.0f, 0.0f, std::log(3.0f), 0.0f});
    const Matrix out = softmax_rows(m, 1.0f);
    CHECK(out.at(0, 0) == doctest::Approx(0.5));
    CHECK(out.at(0, 1) == doctest::Approx(0.5));
    CHECK(out.at(1, 0) == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(out.at(1, 1) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("softmax rows sum to 1 and shift invariance") {
    for (uint32_t seed = 0; seed < 100; ++seed) {
        const Matrix m = random_matrix(4, 7, seed, -5.0f, 5.0f);
        const Matrix out = softmax_rows(m, 2.0f);
        for (int i = 0; i < out.rows; ++i) {
            double s = 0.0;
            for (int j = 0; j < out.cols; ++j) s += out.at(i, j);
            CHECK(std::abs(s - 1.0) < 1e-6);
        }
    }
    // adding a constant to a row leaves its softmax unchanged
    const Matrix m = random_matrix(3, 5, 42);
    Matrix shifted = m;
    for (int j = 0; j < shifted.cols; ++j) shifted.at(1, j) += 3.25f;
    const Matrix a = softmax_rows(m, 1.0f);
    const Matrix b = softmax_rows(shifted, 1.0f);
    for (int j = 0; j < m.cols; ++j)
        CHECK(std::abs(a.at(1, j) - b.at(1, j)) < 1e-6f);
}

TEST_CASE("softmax rejects bad input") {
    Matrix m(1, 2, {1.0f, 2.0f});
    CHECK_THROWS_AS(softmax_rows(m, 0.0f), std::invalid_argument);
    CHECK_THROWS_AS(softmax_rows(m, -1.0f), std::invalid_argument);
    m.at(0, 1) = std::numeric_limits<float>::infinity();
    CHECK_THROWS_AS(softmax_rows(m, 1.0f), std::invalid_argument);
}

TEST_CASE("cosine similarity basics") {
    const Matrix x(3, 2, {1, 0, 0, 1, 1, 1});
    const Matrix sim = cosine_sim_matrix(x, x);
    CHECK(sim.at(0, 0) == doctest::Approx(1.0));
    CHECK(sim.at(0, 1) == doctest::Approx(0.0));
    CHECK(sim.at(2, 0) == doctest::Approx(0.70710678).epsilon(1e-6));

    // zero-norm rows yield 0 by convention
    const Matrix z(1, 2, {0, 0});
    const Matrix zs = cosine_sim_matrix(z, x);
    CHECK(zs.at(0, 0) == 0.0f);
    CHECK(zs.at(0, 2) == 0.0f);
}

TEST_CASE("cosine similarity range and self diagonal") {
    for (uint32_t seed = 0; seed < 20; ++seed) {
        const Matrix x = random_matrix(6, 5, seed, -2.0f, 2.0f);
        const Matrix sim = cosine_sim_matrix(x, x);
        for (float v : sim.data) {
            CHECK(v >= -1.0f - 1e-6f);
            CHECK(v <= 1.0f + 1e-6f);
        }
        for (int i = 0; i < x.rows; ++i)
            CHECK(sim.at(i, i) == doctest::Approx(1.0).epsilon(1e-6));
    }
    const Matrix a(1, 3, {1, 2, 3});
    const Matrix b(2, 2, {1, 2, 3, 4});
    CHECK_THROWS_AS(cosine_sim_matrix(a, b), std::invalid_argument);
}

TEST_CASE("weighted mean examples") {
    const std::vector<std::vector<float>> same = {{1.5f, -2.0f}, {1.5f, -2.0f}};
    const std::vector<float> w1 = {0.3f, 9.0f};
    const auto r1 = weighted_mean(same, w1);
    CHECK(r1[0] == doctest::Approx(1.5));
    CHECK(r1[1] == doctest::Approx(-2.0));

    const std::vector<std::vector<float>> vals = {{2.0f}, {4.0f}};
    const std::vector<float> w2 = {1.0f, 3.0f};
    CHECK(weighted_mean(vals, w2)[0] == doctest::Approx(3.5));

    CHECK_THROWS_AS(weighted_mean({}, {}), std::invalid_argument);
    const std::vector<std::vector<float>> one = {{1.0f}};
    const std::vector<float> bad = {0.0f};
    CHECK_THROWS_AS(weighted_mean(one, bad), std::invalid_argument);
}

TEST_CASE("weighted mean equals arithmetic mean under equal weights") {
    for (uint32_t seed = 0; seed < 50; ++seed) {
        std::mt19937 g(seed);
        const int n = 2 + static_cast<int>(g() % 6);
        const int dim = 1 + static_cast<int>(g() % 4);
        std::vector<std::vector<float>> vals(n, std::vector<float>(dim));
        for (auto& v : vals)
            for (auto& x : v) x = uniform_range(g, -3.0f, 3.0f);
        const std::vector<float> w(n, 0.7f);
        const auto got = weighted_mean(vals, w);
        for (int d = 0; d < dim; ++d) {
            double plain = 0.0;  // independent unweighted mean
            for (const auto& v : vals) plain += v[d];
            plain /= n;
            CHECK(std::abs(got[d] - plain) < 1e-6);
        }
    }
}

TEST_CASE("weighted mean invariant under uniform weight scaling") {
    std::vector<std::vector<float>> vals = {{1.0f, 2.0f}, {3.0f, -1.0f}, {0.5f, 0.5f}};
    std::vector<float> w = {1.0f, 2.0f, 3.0f};
    const auto base = weighted_mean(vals, w);
    for (float& x : w) x *= 37.5f;
    const auto scaled = weighted_mean(vals, w);
    for (size_t d = 0; d < base.size(); ++d)
        CHECK(std::abs(base[d] - scaled[d]) < 1e-6f);
}

TEST_CASE("parallel kernels match the serial reference bit for bit") {
    for (uint32_t seed = 0; seed < 10; ++seed) {
        const Matrix a = random_matrix(17, 23, seed);
        const Matrix b = random_matrix(23, 11, seed + 1000);
        CHECK(matmul(a, b).data == serial::matmul(a, b).data);

        const Matrix m = random_matrix(13, 9, seed + 2000, -4.0f, 4.0f);
        CHECK(softmax_rows(m, 1.5f).data == serial::softmax_rows(m, 1.5f).data);

        const Matrix x = random_matrix(9, 6, seed + 3000);
        const Matrix y = random_matrix(7, 6, seed + 4000);
        CHECK(cosine_sim_matrix(x, y).data == serial::cosine_sim_matrix(x, y).data);

        std::mt19937 g(seed + 5000);
        std::vector<std::vector<float>> vals(5, std::vector<float>(4));
        std::vector<float> w(5);
        for (auto& v : vals)
            for (auto& e : v) e = uniform_range(g, -2.0f, 2.0f);
        for (auto& e : w) e = uniform_range(g, 0.1f, 2.0f);
        CHECK(weighted_mean(vals, w) == serial::weighted_mean(vals, w));
    }
}

TEST_SUITE_END();
