#pragma once

#include <functional>
#include <vector>

#include "tmodlab/errors.hpp"
#include "tmodlab/laurent.hpp"

// Small dense matrices over the workbench's exact coefficient rings.
// Dimensions here top out around a dozen, so everything is naive; what
// matters is that the scalar type controls its own arithmetic exactly.

namespace tmodlab {

template <typename T>
class Mat {
public:
    Mat() : r_(0), c_(0) {}
    Mat(std::size_t r, std::size_t c, const T& fill) : r_(r), c_(c), d_(r * c, fill) {}

    static Mat identity(std::size_t n, const T& zero, const T& one) {
        Mat m(n, n, zero);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = one;
        return m;
    }

    std::size_t rows() const { return r_; }
    std::size_t cols() const { return c_; }

    T& at(std::size_t i, std::size_t j) { return d_[i * c_ + j]; }
    const T& at(std::size_t i, std::size_t j) const { return d_[i * c_ + j]; }

    Mat operator+(const Mat& o) const {
        require_same_shape(o);
        Mat m = *this;
        for (std::size_t i = 0; i < d_.size(); ++i) m.d_[i] = m.d_[i] + o.d_[i];
        return m;
    }
    Mat operator-(const Mat& o) const {
        require_same_shape(o);
        Mat m = *this;
        for (std::size_t i = 0; i < d_.size(); ++i) m.d_[i] = m.d_[i] - o.d_[i];
        return m;
    }
    Mat operator-() const {
        Mat m = *this;
        for (auto& x : m.d_) x = -x;
        return m;
    }
    Mat operator*(const Mat& o) const {
        if (c_ != o.r_) throw ConfigError("Mat: shape mismatch in product");
        Mat m(r_, o.c_, d_.empty() ? T() : zero_like());
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t k = 0; k < c_; ++k) {
                const T& a = at(i, k);
                for (std::size_t j = 0; j < o.c_; ++j)
                    m.at(i, j) = m.at(i, j) + a * o.at(k, j);
            }
        return m;
    }

    Mat scaled(const T& s) const {
        Mat m = *this;
        for (auto& x : m.d_) x = x * s;
        return m;
    }

    Mat transpose() const {
        Mat m(c_, r_, d_.empty() ? T() : d_[0]);
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t j = 0; j < c_; ++j) m.at(j, i) = at(i, j);
        return m;
    }

    Mat map(const std::function<T(const T&)>& f) const {
        Mat m = *this;
        for (auto& x : m.d_) x = f(x);
        return m;
    }

    bool operator==(const Mat& o) const { return r_ == o.r_ && c_ == o.c_ && d_ == o.d_; }

private:
    T zero_like() const { return d_[0] - d_[0]; }
    void require_same_shape(const Mat& o) const {
        if (r_ != o.r_ || c_ != o.c_) throw ConfigError("Mat: shape mismatch");
    }

    std::size_t r_, c_;
    std::vector<T> d_;
};

// Cofactor determinant; fine for the sizes that appear here.
template <typename T>
T det(const Mat<T>& m) {
    if (m.rows() != m.cols()) throw ConfigError("det: square matrix required");
    std::size_t n = m.rows();
    if (n == 1) return m.at(0, 0);
    std::vector<std::size_t> cols(n);
    for (std::size_t j = 0; j < n; ++j) cols[j] = j;
    std::function<T(std::size_t, std::vector<std::size_t>)> rec =
        [&](std::size_t row, std::vector<std::size_t> cs) -> T {
        if (cs.size() == 1) return m.at(row, cs[0]);
        T acc = m.at(row, cs[0]) - m.at(row, cs[0]); // zero of the ring
        for (std::size_t idx = 0; idx < cs.size(); ++idx) {
            std::vector<std::size_t> rest;
            for (std::size_t j = 0; j < cs.size(); ++j)
                if (j != idx) rest.push_back(cs[j]);
            T term = m.at(row, cs[idx]) * rec(row + 1, rest);
            acc = (idx % 2 == 0) ? acc + term : acc - term;
        }
        return acc;
    };
    return rec(0, cols);
}

// Gaussian elimination over the Laurent coefficient field. Pivots prefer the
// entry of smallest valuation so truncated zeros are never divided by.
inline std::size_t row_reduce(Mat<LaurentElem>& m) {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
        std::size_t best = m.rows();
        long long bestv = LaurentElem::POS_INF;
        for (std::size_t i = rank; i < m.rows(); ++i) {
            const auto& x = m.at(i, col);
            if (x.is_zero()) continue;
            long long v = x.val_lower_num();
            if (v < bestv) { bestv = v; best = i; }
        }
        if (best == m.rows()) continue;
        if (best != rank)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m.at(rank, j), m.at(best, j));
        LaurentElem pivinv = m.at(rank, col).inv();
        for (std::size_t j = 0; j < m.cols(); ++j) m.at(rank, j) = m.at(rank, j) * pivinv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == rank || m.at(i, col).is_zero()) continue;
            LaurentElem f = m.at(i, col);
            for (std::size_t j = 0; j < m.cols(); ++j)
                m.at(i, j) = m.at(i, j) - f * m.at(rank, j);
        }
        ++rank;
    }
    return rank;
}

// Inverse of a matrix over the Laurent field via Gauss-Jordan.
inline Mat<LaurentElem> inverse(const Mat<LaurentElem>& m, const FieldCtx& ctx) {
    if (m.rows() != m.cols()) throw ConfigError("inverse: square matrix required");
    std::size_t n = m.rows();
    Mat<LaurentElem> aug(n, 2 * n, LaurentElem::zero(ctx));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, n + i) = LaurentElem::one(ctx);
    }
    if (row_reduce(aug) != n) throw ZeroDivisor("inverse: matrix is singular to precision");
    Mat<LaurentElem> r(n, n, LaurentElem::zero(ctx));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r.at(i, j) = aug.at(i, n + j);
    return r;
}

} // namespace tmodlab
