#pragma once

// Dense order-k arrays, partial indices and the index algebra used to view an
// N x N matrix (N = n_1 ... n_d) as an order-2d array compatible with the
// Kronecker product X = x^(1) (x) ... (x) x^(d).
//
// Axis labels and coordinates are 1-based at the API surface; flat buffers are
// 0-based and row-major with the smallest axis label varying slowest.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace kronchaos {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Sorted list of distinct 1-based axis labels.
using AxisSet = std::vector<int>;

/// Sorts and validates a list of labels (distinct, >= 1). Throws AxisError.
AxisSet make_axis_set(std::vector<int> labels);
/// {first, ..., last}; empty when last < first.
AxisSet axis_range(int first, int last);
AxisSet axis_union(const AxisSet& a, const AxisSet& b);
AxisSet axis_difference(const AxisSet& a, const AxisSet& b);
AxisSet axis_intersection(const AxisSet& a, const AxisSet& b);
/// Adds `offset` to every label.
AxisSet axis_shift(const AxisSet& a, int offset);
bool axis_subset(const AxisSet& sub, const AxisSet& super);

/// Vector of per-axis sizes (n_1, ..., n_d), d >= 1, every n_l >= 1.
class Dims {
public:
    explicit Dims(std::vector<std::size_t> sizes);

    [[nodiscard]] std::size_t order() const { return sizes_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& sizes() const { return sizes_; }
    /// Size of axis `axis` (1-based).
    [[nodiscard]] std::size_t extent(int axis) const;
    /// N = n_1 ... n_d.
    [[nodiscard]] std::size_t total() const { return total_; }
    [[nodiscard]] bool all_equal() const;

    friend bool operator==(const Dims&, const Dims&) = default;

private:
    std::vector<std::size_t> sizes_;
    std::size_t total_ = 1;
};

/// (n_1, ..., n_d, n_1, ..., n_d): the shape of a rearranged N x N matrix.
class DoubledDims {
public:
    explicit DoubledDims(Dims base);

    [[nodiscard]] const Dims& base() const { return base_; }
    [[nodiscard]] const std::vector<std::size_t>& sizes() const { return sizes_; }
    [[nodiscard]] std::size_t order() const { return sizes_.size(); }

private:
    Dims base_;
    std::vector<std::size_t> sizes_;
};

/// A map from an axis set I to coordinates, i_l in [n_l] for l in I.
/// The empty axis set carries exactly one (empty) partial index.
class PartialIndex {
public:
    PartialIndex() = default;
    /// Entries may come in any order. Duplicate axes -> AxisError,
    /// coordinate 0 -> IndexError.
    explicit PartialIndex(std::vector<std::pair<int, std::size_t>> entries);
    /// Full index on axes 1..k.
    static PartialIndex full(std::span<const std::size_t> coords);

    [[nodiscard]] const AxisSet& axes() const { return axes_; }
    [[nodiscard]] const std::vector<std::size_t>& coords() const { return coords_; }
    [[nodiscard]] std::size_t size() const { return axes_.size(); }
    [[nodiscard]] bool empty() const { return axes_.empty(); }
    [[nodiscard]] bool has(int axis) const;
    /// Coordinate on `axis`; AxisError when the axis is not covered.
    [[nodiscard]] std::size_t at(int axis) const;

    friend bool operator==(const PartialIndex&, const PartialIndex&) = default;

private:
    AxisSet axes_;
    std::vector<std::size_t> coords_;
};

/// 1 + sum_l (i_l - 1) prod_{m > l} n_m. `i` must be a full index on [d].
std::size_t flatten_index(const PartialIndex& i, const Dims& dims);
/// Inverse of flatten_index; `flat` is 1-based.
PartialIndex unflatten_index(std::size_t flat, const Dims& dims);

/// (i x j)_l = i_l on I, j_l on J. DisjointnessError when I and J overlap.
PartialIndex dot_times(const PartialIndex& i, const PartialIndex& j);
/// (i + j)_l = i_l on I, j_{l-d} on J + d. DisjointnessError on overlap.
PartialIndex dot_plus(const PartialIndex& i, const PartialIndex& j, int d);
/// Restriction of i to J. AxisError when J is not a subset of i's axes.
PartialIndex restrict_to(const PartialIndex& i, const AxisSet& J);

/// Immutable dense real array. Axes carry labels (sorted, 1-based) so that a
/// partial array such as A^(I), living on I^c u (I^c + d), keeps the labels of
/// its parent. The buffer is row-major in label order.
class TensorArray {
public:
    TensorArray(AxisSet labels, std::vector<std::size_t> shape, std::vector<double> data);
    /// Labels default to 1..k.
    TensorArray(std::vector<std::size_t> shape, std::vector<double> data);

    static TensorArray zeros(AxisSet labels, std::vector<std::size_t> shape);
    static TensorArray scalar(double value);

    [[nodiscard]] std::size_t order() const { return labels_.size(); }
    [[nodiscard]] const AxisSet& labels() const { return labels_; }
    [[nodiscard]] const std::vector<std::size_t>& shape() const { return shape_; }
    [[nodiscard]] const std::vector<std::size_t>& strides() const { return strides_; }
    [[nodiscard]] std::span<const double> data() const { return data_; }
    [[nodiscard]] std::size_t size() const { return data_.size(); }

    /// Position of `label` among the labels; AxisError if absent.
    [[nodiscard]] std::size_t position(int label) const;
    [[nodiscard]] std::size_t extent(int label) const { return shape_[position(label)]; }

    [[nodiscard]] double operator[](std::size_t flat) const { return data_[flat]; }
    /// Entry at a partial index whose axes equal labels().
    [[nodiscard]] double at(const PartialIndex& i) const;
    /// 0-based flat offset of a partial index whose axes equal labels().
    [[nodiscard]] std::size_t offset(const PartialIndex& i) const;

    [[nodiscard]] TensorArray scaled(double c) const;
    /// Same buffer and shape under new labels (must have the same count).
    [[nodiscard]] TensorArray relabeled(AxisSet labels) const;

private:
    AxisSet labels_;
    std::vector<std::size_t> shape_;
    std::vector<std::size_t> strides_;
    std::vector<double> data_;
};

/// Square root of the sum of squared entries.
double frobenius(const TensorArray& B);

/// Views the N x N matrix A as the order-2d array with
/// A_{i + i'} = A[flatten(i), flatten(i')]. ShapeError on size mismatch.
TensorArray rearrange_matrix(const Matrix& A, const Dims& dims);
/// Inverse of rearrange_matrix.
Matrix to_matrix(const TensorArray& A2d);

/// d for an array on doubled dims with labels 1..2d; ShapeError otherwise.
std::size_t half_order(const TensorArray& A2d);
/// Base dims (n_1, ..., n_d) of an array on doubled dims.
Dims base_dims(const TensorArray& A2d);

/// Row-major odometer over a shape (0-based). An empty shape yields one
/// (empty) index.
class Odometer {
public:
    explicit Odometer(std::vector<std::size_t> shape);

    [[nodiscard]] const std::vector<std::size_t>& index() const { return index_; }
    [[nodiscard]] bool done() const { return done_; }
    void advance();

private:
    std::vector<std::size_t> shape_;
    std::vector<std::size_t> index_;
    bool done_ = false;
};

}  // namespace kronchaos
