#pragma once

#include <Eigen/Dense>

namespace signseg {

// Rows are frames, columns are feature dimensions. Row-major so on-disk
// layout and in-memory layout agree.
template <class S>
using MatT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class S>
using VecT = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using MatF = MatT<float>;
using MatD = MatT<double>;
using VecF = VecT<float>;
using VecD = VecT<double>;

}  // namespace signseg
