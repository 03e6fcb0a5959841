#pragma once

#include "kronchaos/tensor_core.hpp"

#include <random>
#include <vector>

namespace testutil {

using kronchaos::Matrix;
using kronchaos::Vector;

inline Matrix gaussian_matrix(std::mt19937_64& gen, long rows, long cols)
{
    std::normal_distribution<double> nd;
    Matrix A(rows, cols);
    for (long r = 0; r < rows; ++r) {
        for (long c = 0; c < cols; ++c) {
            A(r, c) = nd(gen);
        }
    }
    return A;
}

inline Vector gaussian_vector(std::mt19937_64& gen, long n)
{
    return gaussian_matrix(gen, n, 1).col(0);
}

inline std::vector<double> gaussian_buffer(std::mt19937_64& gen, std::size_t n)
{
    std::normal_distribution<double> nd;
    std::vector<double> v(n);
    for (auto& x : v) {
        x = nd(gen);
    }
    return v;
}

// Kronecker product by the textbook block formula, axis 1 slowest.
inline Vector kron(const std::vector<Vector>& xs)
{
    Vector out = Vector::Ones(1);
    for (const auto& x : xs) {
        Vector next(out.size() * x.size());
        for (long a = 0; a < out.size(); ++a) {
            for (long b = 0; b < x.size(); ++b) {
                next[a * x.size() + b] = out[a] * x[b];
            }
        }
        out = next;
    }
    return out;
}

}  // namespace testutil
