#ifndef SHADOWCAST_TENSOR_HPP
#define SHADOWCAST_TENSOR_HPP

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "shadowcast/error.hpp"

namespace shadowcast {

// Dense row-major tensor of 64-bit floats. Shapes up to rank 3 are used.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s)
        : shape(std::move(s)),
          data(std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>()), 0.0) {}

    static Tensor zeros(std::initializer_list<std::size_t> s) { return Tensor(std::vector<std::size_t>(s)); }

    static Tensor full(std::initializer_list<std::size_t> s, double v) {
        Tensor t{std::vector<std::size_t>(s)};
        for (double& x : t.data) x = v;
        return t;
    }

    static Tensor row(std::vector<double> values) {
        Tensor t;
        t.shape = {values.size()};
        t.data = std::move(values);
        return t;
    }

    std::size_t numel() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }

    std::size_t rows() const { return shape.at(0); }
    std::size_t cols() const { return shape.at(1); }

    double& operator()(std::size_t r, std::size_t c) { return data[r * shape[1] + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * shape[1] + c]; }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

inline std::string shape_str(const Tensor& t) {
    std::string s = "(";
    for (std::size_t i = 0; i < t.shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(t.shape[i]);
    }
    return s + ")";
}

inline void check_finite(const Tensor& t, const char* where) {
    for (double x : t.data) {
        if (!std::isfinite(x)) throw NumericFault(std::string("non-finite value in ") + where);
    }
}

}  // namespace shadowcast

#endif
