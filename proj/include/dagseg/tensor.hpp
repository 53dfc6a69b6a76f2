#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace dagseg {

// Dense row-major tensor of doubles, rank <= 2. A vector is shaped (n, 1).
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}

    static Tensor vec(int n) { return Tensor(n, 1); }

    int size() const { return rows * cols; }
    bool is_vector() const { return cols == 1; }
    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }

    double& at(int i, int j) { return v[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return v[static_cast<std::size_t>(i) * cols + j]; }
    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }

    void fill(double x) { std::fill(v.begin(), v.end(), x); }

    bool finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }

    double l2_norm_sq() const {
        double s = 0.0;
        for (double x : v) s += x * x;
        return s;
    }
};

} // namespace dagseg
