#pragma once

#include <cstddef>
#include <vector>

namespace etsim {

/// Dense row-major n x n matrix.
template <typename T>
class SquareMatrix {
public:
    SquareMatrix() = default;
    SquareMatrix(int n, T fill) : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {}

    int size() const { return n_; }
    T& operator()(int i, int j) { return data_[index(i, j)]; }
    const T& operator()(int i, int j) const { return data_[index(i, j)]; }
    T* row(int i) { return data_.data() + index(i, 0); }
    const T* row(int i) const { return data_.data() + index(i, 0); }

    bool operator==(const SquareMatrix&) const = default;

private:
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

    int n_ = 0;
    std::vector<T> data_;
};

}  // namespace etsim
