#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ad/tensor.hpp"
#include "common/rng.hpp"

namespace test_util {

inline vdea::ad::Tensor random_tensor(vdea::rng::Engine& eng, std::size_t rows, std::size_t cols,
                                      double lo = -1.0, double hi = 1.0,
                                      bool requires_grad = true) {
    vdea::ad::Tensor t(rows, cols);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = eng.uniform(lo, hi);
    t.requires_grad = requires_grad;
    return t;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Scratch directory under the test binary's cwd, wiped on construction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& name) : path(std::filesystem::path("tmp_tests") / name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
};

// Adjusted Rand index between two hard labelings.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    const std::size_t n = a.size();
    int ka = 0, kb = 0;
    for (int x : a) ka = std::max(ka, x + 1);
    for (int x : b) kb = std::max(kb, x + 1);
    std::vector<std::vector<long long>> table(ka, std::vector<long long>(kb, 0));
    for (std::size_t i = 0; i < n; ++i) ++table[a[i]][b[i]];
    auto comb2 = [](long long m) { return m * (m - 1) / 2.0; };
    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (int i = 0; i < ka; ++i) {
        long long row = 0;
        for (int j = 0; j < kb; ++j) {
            sum_ij += comb2(table[i][j]);
            row += table[i][j];
        }
        sum_a += comb2(row);
    }
    for (int j = 0; j < kb; ++j) {
        long long col = 0;
        for (int i = 0; i < ka; ++i) col += table[i][j];
        sum_b += comb2(col);
    }
    const double all = comb2(static_cast<long long>(n));
    const double expected = sum_a * sum_b / all;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;
    return (sum_ij - expected) / (max_index - expected);
}

}  // namespace test_util
