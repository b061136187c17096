#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace rhd {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
constexpr Vec<N> zero_vec()
{
    Vec<N> v{};
    return v;
}

template <std::size_t N>
inline Vec<N> operator+(const Vec<N>& a, const Vec<N>& b)
{
    Vec<N> r;
    for (int i = 0; i < N; ++i) r[i] = a[i] + b[i];
    return r;
}

template <std::size_t N>
inline Vec<N> operator-(const Vec<N>& a, const Vec<N>& b)
{
    Vec<N> r;
    for (int i = 0; i < N; ++i) r[i] = a[i] - b[i];
    return r;
}

template <std::size_t N>
inline Vec<N> operator*(double s, const Vec<N>& a)
{
    Vec<N> r;
    for (int i = 0; i < N; ++i) r[i] = s * a[i];
    return r;
}

template <std::size_t N>
inline Vec<N>& operator+=(Vec<N>& a, const Vec<N>& b)
{
    for (int i = 0; i < N; ++i) a[i] += b[i];
    return a;
}

template <std::size_t N>
inline Vec<N>& operator-=(Vec<N>& a, const Vec<N>& b)
{
    for (int i = 0; i < N; ++i) a[i] -= b[i];
    return a;
}

template <std::size_t N>
inline double dot(const Vec<N>& a, const Vec<N>& b)
{
    double s = 0;
    for (int i = 0; i < N; ++i) s += a[i] * b[i];
    return s;
}

template <std::size_t N>
inline double norm(const Vec<N>& a)
{
    return std::sqrt(dot(a, a));
}

/// Dense square matrix of fixed size, row major.
template <std::size_t N>
struct Mat {
    std::array<double, N * N> a{};

    double& operator()(int i, int j) { return a[i * N + j]; }
    double operator()(int i, int j) const { return a[i * N + j]; }

    static Mat identity()
    {
        Mat m;
        for (int i = 0; i < N; ++i) m(i, i) = 1.0;
        return m;
    }
};

template <std::size_t N>
inline Vec<N> operator*(const Mat<N>& m, const Vec<N>& v)
{
    Vec<N> r{};
    for (int i = 0; i < N; ++i) {
        double s = 0;
        for (int j = 0; j < N; ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

template <std::size_t N>
inline Mat<N> operator*(const Mat<N>& a, const Mat<N>& b)
{
    Mat<N> r;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double s = 0;
            for (int k = 0; k < N; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    return r;
}

template <std::size_t N>
inline Mat<N> transpose(const Mat<N>& m)
{
    Mat<N> r;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) r(i, j) = m(j, i);
    return r;
}

/// Multiply by the transpose without forming it: returns m^T v.
template <std::size_t N>
inline Vec<N> transpose_times(const Mat<N>& m, const Vec<N>& v)
{
    Vec<N> r{};
    for (int j = 0; j < N; ++j) {
        const double vj = v[j];
        for (int i = 0; i < N; ++i) r[i] += m(j, i) * vj;
    }
    return r;
}

/// Solve m x = b by Gaussian elimination with partial pivoting.
template <std::size_t N>
inline Vec<N> solve(Mat<N> m, Vec<N> b)
{
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
        if (m(piv, col) == 0.0) throw std::runtime_error("singular matrix in solve()");
        if (piv != col) {
            for (int j = 0; j < N; ++j) std::swap(m(col, j), m(piv, j));
            std::swap(b[col], b[piv]);
        }
        const double inv = 1.0 / m(col, col);
        for (int r = col + 1; r < N; ++r) {
            const double f = m(r, col) * inv;
            if (f == 0.0) continue;
            for (int j = col; j < N; ++j) m(r, j) -= f * m(col, j);
            b[r] -= f * b[col];
        }
    }
    Vec<N> x{};
    for (int i = N - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < N; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

template <std::size_t N>
inline Mat<N> inverse(const Mat<N>& m)
{
    Mat<N> r;
    for (int col = 0; col < N; ++col) {
        Vec<N> e{};
        e[col] = 1.0;
        Vec<N> x = solve(m, e);
        for (int i = 0; i < N; ++i) r(i, col) = x[i];
    }
    return r;
}

} // namespace rhd
