#ifndef NLLRTC_TENSOR_HPP_
#define NLLRTC_TENSOR_HPP_

#include <Eigen/Core>
#include <Eigen/SVD>

#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nllrtc {

/// Dimension sizes (J_1..J_N). Order is between 1 and 4.
using Shape = std::vector<Eigen::Index>;

inline Eigen::Index numElements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), Eigen::Index{1},
                         std::multiplies<>());
}

/// Element strides for the lexicographic layout (first index fastest).
inline std::vector<Eigen::Index> stridesOf(const Shape& shape) {
  std::vector<Eigen::Index> strides(shape.size());
  Eigen::Index s = 1;
  for (std::size_t d = 0; d < shape.size(); ++d) {
    strides[d] = s;
    s *= shape[d];
  }
  return strides;
}

/// Dense N-order tensor, N in [1,4]. Entries are stored lexicographically
/// with the first index varying fastest.
template <typename Scalar>
class Tensor {
 public:
  using DataVector = Eigen::Vector<Scalar, Eigen::Dynamic>;

  Tensor() = default;

  explicit Tensor(Shape shape) : shape_(std::move(shape)) {
    checkShape(shape_);
    data_ = DataVector::Zero(numElements(shape_));
  }

  Tensor(Shape shape, DataVector data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    checkShape(shape_);
    if (data_.size() != numElements(shape_))
      throw std::invalid_argument("tensor data length does not match shape");
  }

  static Tensor Zero(Shape shape) { return Tensor(std::move(shape)); }

  static Tensor Constant(Shape shape, Scalar value) {
    Tensor t(std::move(shape));
    t.data_.setConstant(value);
    return t;
  }

  int order() const { return static_cast<int>(shape_.size()); }
  const Shape& shape() const { return shape_; }
  Eigen::Index dim(int d) const { return shape_[static_cast<std::size_t>(d)]; }
  Eigen::Index size() const { return data_.size(); }

  const DataVector& data() const { return data_; }
  DataVector& data() { return data_; }

  Scalar operator[](Eigen::Index linear) const { return data_[linear]; }
  Scalar& operator[](Eigen::Index linear) { return data_[linear]; }

  /// 0-based multi-index access.
  template <typename... Ix>
  Scalar operator()(Ix... idx) const {
    return data_[linearIndex(idx...)];
  }
  template <typename... Ix>
  Scalar& operator()(Ix... idx) {
    return data_[linearIndex(idx...)];
  }

  template <typename... Ix>
  Eigen::Index linearIndex(Ix... idx) const {
    static_assert(sizeof...(Ix) >= 1 && sizeof...(Ix) <= 4);
    const Eigen::Index ix[] = {static_cast<Eigen::Index>(idx)...};
    if (sizeof...(Ix) != shape_.size())
      throw std::invalid_argument("index arity does not match tensor order");
    Eigen::Index linear = 0;
    Eigen::Index stride = 1;
    for (std::size_t d = 0; d < shape_.size(); ++d) {
      linear += ix[d] * stride;
      stride *= shape_[d];
    }
    return linear;
  }

  bool operator==(const Tensor& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  static void checkShape(const Shape& shape) {
    if (shape.empty() || shape.size() > 4)
      throw std::invalid_argument("tensor order must be between 1 and 4");
    for (Eigen::Index d : shape)
      if (d < 1) throw std::invalid_argument("tensor dimensions must be >= 1");
  }

  Shape shape_;
  DataVector data_;
};

using TensorXd = Tensor<double>;
using TensorXb = Tensor<std::uint8_t>;

/// Mode-n unfolding: rows are indexed by the unfolding mode, columns are the
/// mode-n fibers in lexicographic order (lowest remaining index fastest).
template <typename Scalar>
struct Unfolding {
  int mode = 1;  // 1-based
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix;
  Shape sourceShape;
};

/// Number of mode-n fibers: the product of all dimensions except J_mode.
inline Eigen::Index countFibers(const Shape& shape, int mode) {
  if (mode < 1 || mode > static_cast<int>(shape.size()))
    throw std::invalid_argument("unfolding mode out of range");
  Eigen::Index count = 1;
  for (std::size_t d = 0; d < shape.size(); ++d)
    if (d != static_cast<std::size_t>(mode - 1)) count *= shape[d];
  return count;
}

template <typename Scalar>
Unfolding<Scalar> unfold(const Tensor<Scalar>& t, int mode) {
  const int N = t.order();
  if (mode < 1 || mode > N)
    throw std::invalid_argument("unfolding mode out of range");
  const std::size_t m = static_cast<std::size_t>(mode - 1);
  const Shape& shape = t.shape();
  const auto strides = stridesOf(shape);

  const Eigen::Index rows = shape[m];
  const Eigen::Index cols = countFibers(shape, mode);

  std::vector<std::size_t> rest;
  for (std::size_t d = 0; d < shape.size(); ++d)
    if (d != m) rest.push_back(d);

  Unfolding<Scalar> u;
  u.mode = mode;
  u.sourceShape = shape;
  u.matrix.resize(rows, cols);

  std::vector<Eigen::Index> idx(rest.size(), 0);
  for (Eigen::Index col = 0; col < cols; ++col) {
    Eigen::Index base = 0;
    for (std::size_t k = 0; k < rest.size(); ++k) base += idx[k] * strides[rest[k]];
    for (Eigen::Index r = 0; r < rows; ++r)
      u.matrix(r, col) = t[base + r * strides[m]];
    // odometer over the remaining indices, lowest index fastest
    for (std::size_t k = 0; k < rest.size(); ++k) {
      if (++idx[k] < shape[rest[k]]) break;
      idx[k] = 0;
    }
  }
  return u;
}

template <typename Scalar>
Tensor<Scalar> fold(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& matrix,
    int mode, const Shape& shape) {
  if (mode < 1 || mode > static_cast<int>(shape.size()))
    throw std::invalid_argument("fold mode out of range");
  const std::size_t m = static_cast<std::size_t>(mode - 1);
  if (matrix.rows() != shape[m] || matrix.cols() != countFibers(shape, mode))
    throw std::invalid_argument("matrix dimensions inconsistent with shape");

  const auto strides = stridesOf(shape);
  std::vector<std::size_t> rest;
  for (std::size_t d = 0; d < shape.size(); ++d)
    if (d != m) rest.push_back(d);

  Tensor<Scalar> t(shape);
  std::vector<Eigen::Index> idx(rest.size(), 0);
  for (Eigen::Index col = 0; col < matrix.cols(); ++col) {
    Eigen::Index base = 0;
    for (std::size_t k = 0; k < rest.size(); ++k) base += idx[k] * strides[rest[k]];
    for (Eigen::Index r = 0; r < matrix.rows(); ++r)
      t[base + r * strides[m]] = matrix(r, col);
    for (std::size_t k = 0; k < rest.size(); ++k) {
      if (++idx[k] < shape[rest[k]]) break;
      idx[k] = 0;
    }
  }
  return t;
}

/// Count of singular values above relTol times the largest one.
/// The all-zero matrix has rank 0.
inline Eigen::Index numericalRank(const Eigen::MatrixXd& m, double relTol) {
  if (m.size() == 0) throw std::invalid_argument("empty matrix");
  if (relTol <= 0.0 || relTol >= 1.0)
    throw std::invalid_argument("relTol must lie in (0,1)");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  const double cutoff = relTol * sv[0];
  Eigen::Index rank = 0;
  for (Eigen::Index j = 0; j < sv.size(); ++j)
    if (sv[j] > cutoff) ++rank;
  return rank;
}

}  // namespace nllrtc

#endif  // NLLRTC_TENSOR_HPP_
