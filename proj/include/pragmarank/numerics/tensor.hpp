#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "pragmarank/errors.hpp"

namespace prk {

// Dense row-major f64 tensor. Everything in this project is rank-2
// (scalars are 1×1), but the shape is kept as a general extent list.
class Tensor {
public:
    Tensor() = default;

    Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
        : shape_{rows, cols}, data_(rows * cols, fill) {
        if (rows == 0 || cols == 0) throw DimensionError("Tensor: zero extent");
    }

    Tensor(std::initializer_list<std::initializer_list<double>> rows) {
        shape_ = {rows.size(), rows.begin()->size()};
        data_.reserve(shape_[0] * shape_[1]);
        for (const auto& r : rows) {
            if (r.size() != shape_[1]) throw DimensionError("Tensor: ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Tensor scalar(double v) {
        Tensor t(1, 1);
        t.data_[0] = v;
        return t;
    }

    static Tensor identity(std::size_t n) {
        Tensor t(n, n);
        for (std::size_t i = 0; i < n; ++i) t.data_[i * n + i] = 1.0;
        return t;
    }

    // Construction path for values coming from files / user input.
    static Tensor from_external(std::vector<std::size_t> shape, std::vector<double> data) {
        std::size_t need = 1;
        for (std::size_t e : shape) {
            if (e == 0) throw DimensionError("Tensor: zero extent");
            need *= e;
        }
        if (need != data.size())
            throw DimensionError("Tensor: data length " + std::to_string(data.size()) +
                                 " does not match shape product " + std::to_string(need));
        for (double v : data)
            if (!std::isfinite(v)) throw ContractError("Tensor: non-finite value in external input");
        Tensor t;
        t.shape_ = std::move(shape);
        t.data_ = std::move(data);
        return t;
    }

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rows() const { return shape_.at(0); }
    std::size_t cols() const { return shape_.at(1); }
    std::size_t size() const { return data_.size(); }
    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double item() const {
        if (size() != 1) throw ContractError("Tensor::item: not a scalar");
        return data_[0];
    }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    std::string shape_str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < shape_.size(); ++i)
            s += (i ? "x" : "") + std::to_string(shape_[i]);
        return s + "]";
    }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.shape_ == b.shape_ && a.data_ == b.data_;
    }

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

}  // namespace prk
