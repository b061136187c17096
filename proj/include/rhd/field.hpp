#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <vector>

namespace rhd {

template <std::size_t Dim>
using Index = std::array<int, Dim>;

/// Dense row-major array over a structured index box, with an optional
/// ghost frame of uniform width on every side. Interior indices run in
/// [0, dims); ghosted fields accept indices in [-ghost, dims + ghost).
template <class T, std::size_t Dim>
class Field {
    static_assert(Dim == 2 || Dim == 3);

public:
    Field() = default;

    explicit Field(Index<Dim> dims, int ghost = 0, const T& fill = T{})
        : dims_(dims), ghost_(ghost)
    {
        std::size_t n = 1;
        for (int d = 0; d < Dim; ++d) {
            ext_[d] = dims[d] + 2 * ghost;
            n *= static_cast<std::size_t>(ext_[d]);
        }
        if constexpr (Dim == 2) {
            stride_ = {ext_[1], 1};
        } else {
            stride_ = {ext_[1] * ext_[2], ext_[2], 1};
        }
        data_.assign(n, fill);
    }

    const Index<Dim>& dims() const { return dims_; }
    int dim(int d) const { return dims_[d]; }
    int ghost() const { return ghost_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    T& operator[](std::size_t flat) { return data_[flat]; }
    const T& operator[](std::size_t flat) const { return data_[flat]; }

    std::size_t flat(const Index<Dim>& i) const
    {
        std::size_t f = 0;
        for (int d = 0; d < Dim; ++d) {
            assert(i[d] >= -ghost_ && i[d] < dims_[d] + ghost_);
            f += static_cast<std::size_t>(i[d] + ghost_) * stride_[d];
        }
        return f;
    }

    T& operator()(const Index<Dim>& i) { return data_[flat(i)]; }
    const T& operator()(const Index<Dim>& i) const { return data_[flat(i)]; }

    T& operator()(int i, int j)
        requires(Dim == 2)
    {
        return data_[flat({i, j})];
    }
    const T& operator()(int i, int j) const
        requires(Dim == 2)
    {
        return data_[flat({i, j})];
    }
    T& operator()(int i, int j, int k)
        requires(Dim == 3)
    {
        return data_[flat({i, j, k})];
    }
    const T& operator()(int i, int j, int k) const
        requires(Dim == 3)
    {
        return data_[flat({i, j, k})];
    }

private:
    Index<Dim> dims_{};
    Index<Dim> ext_{};
    Index<Dim> stride_{};
    int ghost_ = 0;
    std::vector<T> data_;
};

/// Visit every index of the box [lo, hi), serially.
template <std::size_t Dim, class F>
inline void for_box(const Index<Dim>& lo, const Index<Dim>& hi, F&& f)
{
    if constexpr (Dim == 2) {
        for (int i = lo[0]; i < hi[0]; ++i)
            for (int j = lo[1]; j < hi[1]; ++j) f(Index<2>{i, j});
    } else {
        for (int i = lo[0]; i < hi[0]; ++i)
            for (int j = lo[1]; j < hi[1]; ++j)
                for (int k = lo[2]; k < hi[2]; ++k) f(Index<3>{i, j, k});
    }
}

template <std::size_t Dim, class F>
inline void for_box(const Index<Dim>& hi, F&& f)
{
    for_box<Dim>(Index<Dim>{}, hi, std::forward<F>(f));
}

/// Execution policy for the hot kernels: the parallel path uses OpenMP,
/// the serial path is the reference implementation used in tests and as
/// the benchmark baseline.
enum class Exec { serial, parallel };

/// Visit every index of [lo, hi), parallelizing over the leading
/// dimensions. Writes must go to disjoint locations per index.
template <std::size_t Dim, class F>
inline void for_box_par(Exec ex, const Index<Dim>& lo, const Index<Dim>& hi, F&& f)
{
    const bool par = (ex == Exec::parallel);
    if constexpr (Dim == 2) {
#pragma omp parallel for schedule(static) collapse(2) if (par)
        for (int i = lo[0]; i < hi[0]; ++i)
            for (int j = lo[1]; j < hi[1]; ++j) f(Index<2>{i, j});
    } else {
#pragma omp parallel for schedule(static) collapse(2) if (par)
        for (int i = lo[0]; i < hi[0]; ++i)
            for (int j = lo[1]; j < hi[1]; ++j)
                for (int k = lo[2]; k < hi[2]; ++k) f(Index<3>{i, j, k});
    }
}

template <std::size_t Dim, class F>
inline void for_box_par(Exec ex, const Index<Dim>& hi, F&& f)
{
    for_box_par<Dim>(ex, Index<Dim>{}, hi, std::forward<F>(f));
}

template <std::size_t Dim>
inline Index<Dim> shifted(Index<Dim> i, int d, int by)
{
    i[d] += by;
    return i;
}

} // namespace rhd
