#include "kronchaos/tensor_core.hpp"

#include "kronchaos/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kronchaos {

AxisSet make_axis_set(std::vector<int> labels)
{
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
        throw AxisError("axis set contains a repeated label");
    }
    if (!labels.empty() && labels.front() < 1) {
        throw AxisError("axis labels are 1-based");
    }
    return labels;
}

AxisSet axis_range(int first, int last)
{
    AxisSet out;
    for (int l = first; l <= last; ++l) {
        out.push_back(l);
    }
    return out;
}

AxisSet axis_union(const AxisSet& a, const AxisSet& b)
{
    AxisSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

AxisSet axis_difference(const AxisSet& a, const AxisSet& b)
{
    AxisSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

AxisSet axis_intersection(const AxisSet& a, const AxisSet& b)
{
    AxisSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

AxisSet axis_shift(const AxisSet& a, int offset)
{
    AxisSet out(a);
    for (auto& l : out) {
        l += offset;
    }
    return out;
}

bool axis_subset(const AxisSet& sub, const AxisSet& super)
{
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

// ---------------------------------------------------------------- Dims

Dims::Dims(std::vector<std::size_t> sizes) : sizes_(std::move(sizes))
{
    if (sizes_.empty()) {
        throw ShapeError("dims must have at least one axis");
    }
    for (auto n : sizes_) {
        if (n == 0) {
            throw ShapeError("every axis size must be >= 1");
        }
        if (total_ > std::numeric_limits<std::size_t>::max() / n) {
            throw SizeError("product of dims overflows the addressable range");
        }
        total_ *= n;
    }
}

std::size_t Dims::extent(int axis) const
{
    if (axis < 1 || static_cast<std::size_t>(axis) > sizes_.size()) {
        throw AxisError("axis " + std::to_string(axis) + " out of range");
    }
    return sizes_[static_cast<std::size_t>(axis - 1)];
}

bool Dims::all_equal() const
{
    return std::all_of(sizes_.begin(), sizes_.end(), [&](auto n) { return n == sizes_.front(); });
}

DoubledDims::DoubledDims(Dims base) : base_(std::move(base))
{
    sizes_ = base_.sizes();
    sizes_.insert(sizes_.end(), base_.sizes().begin(), base_.sizes().end());
}

// ---------------------------------------------------------------- PartialIndex

PartialIndex::PartialIndex(std::vector<std::pair<int, std::size_t>> entries)
{
    std::sort(entries.begin(), entries.end());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto [axis, coord] = entries[k];
        if (axis < 1) {
            throw AxisError("axis labels are 1-based");
        }
        if (k > 0 && entries[k - 1].first == axis) {
            throw AxisError("partial index defines axis " + std::to_string(axis) + " twice");
        }
        if (coord < 1) {
            throw IndexError("coordinates are 1-based");
        }
        axes_.push_back(axis);
        coords_.push_back(coord);
    }
}

PartialIndex PartialIndex::full(std::span<const std::size_t> coords)
{
    std::vector<std::pair<int, std::size_t>> entries;
    entries.reserve(coords.size());
    for (std::size_t k = 0; k < coords.size(); ++k) {
        entries.emplace_back(static_cast<int>(k + 1), coords[k]);
    }
    return PartialIndex(std::move(entries));
}

bool PartialIndex::has(int axis) const
{
    return std::binary_search(axes_.begin(), axes_.end(), axis);
}

std::size_t PartialIndex::at(int axis) const
{
    const auto it = std::lower_bound(axes_.begin(), axes_.end(), axis);
    if (it == axes_.end() || *it != axis) {
        throw AxisError("partial index has no axis " + std::to_string(axis));
    }
    return coords_[static_cast<std::size_t>(it - axes_.begin())];
}

std::size_t flatten_index(const PartialIndex& i, const Dims& dims)
{
    if (i.axes() != axis_range(1, static_cast<int>(dims.order()))) {
        throw AxisError("flatten_index needs a full index on [d]");
    }
    std::size_t flat = 0;
    for (std::size_t l = 0; l < dims.order(); ++l) {
        const auto c = i.coords()[l];
        if (c > dims.sizes()[l]) {
            throw IndexError("coordinate " + std::to_string(c) + " exceeds axis size "
                             + std::to_string(dims.sizes()[l]));
        }
        flat = flat * dims.sizes()[l] + (c - 1);
    }
    return flat + 1;
}

PartialIndex unflatten_index(std::size_t flat, const Dims& dims)
{
    if (flat < 1 || flat > dims.total()) {
        throw IndexError("flat index out of range");
    }
    std::vector<std::size_t> coords(dims.order());
    std::size_t rest = flat - 1;
    for (std::size_t l = dims.order(); l-- > 0;) {
        coords[l] = rest % dims.sizes()[l] + 1;
        rest /= dims.sizes()[l];
    }
    return PartialIndex::full(coords);
}

namespace {

PartialIndex merge_disjoint(const PartialIndex& i, const PartialIndex& j, int shift)
{
    std::vector<std::pair<int, std::size_t>> entries;
    for (std::size_t k = 0; k < i.size(); ++k) {
        entries.emplace_back(i.axes()[k], i.coords()[k]);
    }
    for (std::size_t k = 0; k < j.size(); ++k) {
        const int axis = j.axes()[k] + shift;
        if (i.has(axis)) {
            throw DisjointnessError("axis " + std::to_string(axis) + " is defined by both operands");
        }
        entries.emplace_back(axis, j.coords()[k]);
    }
    return PartialIndex(std::move(entries));
}

}  // namespace

PartialIndex dot_times(const PartialIndex& i, const PartialIndex& j)
{
    return merge_disjoint(i, j, 0);
}

PartialIndex dot_plus(const PartialIndex& i, const PartialIndex& j, int d)
{
    return merge_disjoint(i, j, d);
}

PartialIndex restrict_to(const PartialIndex& i, const AxisSet& J)
{
    if (!axis_subset(J, i.axes())) {
        throw AxisError("restriction target is not a subset of the index axes");
    }
    std::vector<std::pair<int, std::size_t>> entries;
    for (int axis : J) {
        entries.emplace_back(axis, i.at(axis));
    }
    return PartialIndex(std::move(entries));
}

// ---------------------------------------------------------------- TensorArray

TensorArray::TensorArray(AxisSet labels, std::vector<std::size_t> shape, std::vector<double> data)
    : labels_(make_axis_set(std::move(labels))), shape_(std::move(shape)), data_(std::move(data))
{
    if (labels_.size() != shape_.size()) {
        throw ShapeError("label count does not match array order");
    }
    std::size_t total = 1;
    for (auto n : shape_) {
        if (n == 0) {
            throw ShapeError("every axis size must be >= 1");
        }
        if (total > std::numeric_limits<std::size_t>::max() / n) {
            throw SizeError("array size overflows the addressable range");
        }
        total *= n;
    }
    if (data_.size() != total) {
        throw ShapeError("buffer length " + std::to_string(data_.size()) + " does not match shape product "
                         + std::to_string(total));
    }
    strides_.assign(shape_.size(), 1);
    for (std::size_t k = shape_.size(); k-- > 1;) {
        strides_[k - 1] = strides_[k] * shape_[k];
    }
}

TensorArray::TensorArray(std::vector<std::size_t> shape, std::vector<double> data)
    : TensorArray(axis_range(1, static_cast<int>(shape.size())), shape, std::move(data))
{
}

TensorArray TensorArray::zeros(AxisSet labels, std::vector<std::size_t> shape)
{
    std::size_t total = 1;
    for (auto n : shape) {
        total *= n;
    }
    return TensorArray(std::move(labels), std::move(shape), std::vector<double>(total, 0.0));
}

TensorArray TensorArray::scalar(double value)
{
    return TensorArray(AxisSet{}, {}, {value});
}

std::size_t TensorArray::position(int label) const
{
    const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) {
        throw AxisError("array has no axis labelled " + std::to_string(label));
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t TensorArray::offset(const PartialIndex& i) const
{
    if (i.axes() != labels_) {
        throw AxisError("index axes do not match array labels");
    }
    std::size_t flat = 0;
    for (std::size_t k = 0; k < shape_.size(); ++k) {
        const auto c = i.coords()[k];
        if (c > shape_[k]) {
            throw IndexError("coordinate out of axis bound");
        }
        flat += (c - 1) * strides_[k];
    }
    return flat;
}

double TensorArray::at(const PartialIndex& i) const
{
    return data_[offset(i)];
}

TensorArray TensorArray::scaled(double c) const
{
    std::vector<double> out(data_);
    for (auto& v : out) {
        v *= c;
    }
    return TensorArray(labels_, shape_, std::move(out));
}

TensorArray TensorArray::relabeled(AxisSet labels) const
{
    return TensorArray(std::move(labels), shape_, data_);
}

double frobenius(const TensorArray& B)
{
    // Scaled accumulation keeps tiny/huge entries from under/overflowing.
    double scale = 0.0;
    for (double v : B.data()) {
        scale = std::max(scale, std::abs(v));
    }
    if (scale == 0.0) {
        return 0.0;
    }
    double sum = 0.0;
    for (double v : B.data()) {
        const double r = v / scale;
        sum += r * r;
    }
    return scale * std::sqrt(sum);
}

TensorArray rearrange_matrix(const Matrix& A, const Dims& dims)
{
    const auto N = dims.total();
    if (static_cast<std::size_t>(A.rows()) != N || static_cast<std::size_t>(A.cols()) != N) {
        throw ShapeError("matrix is " + std::to_string(A.rows()) + "x" + std::to_string(A.cols())
                         + " but dims require " + std::to_string(N) + "x" + std::to_string(N));
    }
    // With row-major flattening, offset(i + i') = flatten(i) * N + flatten(i'),
    // so the array buffer is the row-major matrix buffer.
    std::vector<double> data(N * N);
    for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t c = 0; c < N; ++c) {
            data[r * N + c] = A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return TensorArray(DoubledDims(dims).sizes(), std::move(data));
}

std::size_t half_order(const TensorArray& A2d)
{
    const auto k = A2d.order();
    if (k == 0 || k % 2 != 0) {
        throw ShapeError("array on doubled dims must have even order >= 2");
    }
    if (A2d.labels() != axis_range(1, static_cast<int>(k))) {
        throw ShapeError("array on doubled dims must be labelled 1..2d");
    }
    const auto d = k / 2;
    for (std::size_t l = 0; l < d; ++l) {
        if (A2d.shape()[l] != A2d.shape()[l + d]) {
            throw ShapeError("axes l and l+d must have equal size");
        }
    }
    return d;
}

Dims base_dims(const TensorArray& A2d)
{
    const auto d = half_order(A2d);
    return Dims(std::vector<std::size_t>(A2d.shape().begin(), A2d.shape().begin() + static_cast<std::ptrdiff_t>(d)));
}

Matrix to_matrix(const TensorArray& A2d)
{
    const auto N = base_dims(A2d).total();
    Matrix A(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t c = 0; c < N; ++c) {
            A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = A2d[r * N + c];
        }
    }
    return A;
}

// ---------------------------------------------------------------- Odometer

Odometer::Odometer(std::vector<std::size_t> shape) : shape_(std::move(shape)), index_(shape_.size(), 0)
{
    done_ = std::any_of(shape_.begin(), shape_.end(), [](auto n) { return n == 0; });
}

void Odometer::advance()
{
    for (std::size_t k = shape_.size(); k-- > 0;) {
        if (++index_[k] < shape_[k]) {
            return;
        }
        index_[k] = 0;
    }
    done_ = true;
}

}  // namespace kronchaos
