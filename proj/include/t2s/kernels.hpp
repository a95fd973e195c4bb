#pragma once

// Numeric routines of the schema-item classifier, written as free functions
// over Eigen dense types and templated on the scalar. They operate on
// supplied embeddings and weights; nothing here trains.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "t2s/error.hpp"

namespace t2s::kernels {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

// Guard for the row-wise L2 normalization at the zero vector.
inline constexpr double kNormEpsilon = 1e-12;

// Multi-head attention parameters for model width d and h heads. Each head
// projects d -> d/h; heads are concatenated and mapped d -> d by `output`.
template <class Scalar>
struct AttentionWeights {
  std::vector<Matrix<Scalar>> query;  // h matrices, d x d/h
  std::vector<Matrix<Scalar>> key;
  std::vector<Matrix<Scalar>> value;
  Matrix<Scalar> output;              // d x d

  Eigen::Index heads() const { return static_cast<Eigen::Index>(query.size()); }
  Eigen::Index model_dim() const { return output.rows(); }

  // Head j sees coordinates [j*d/h, (j+1)*d/h); output is the identity.
  static AttentionWeights identity(Eigen::Index d, Eigen::Index h) {
    if (h <= 0 || d <= 0 || d % h != 0) throw ShapeError("model width must be divisible by heads");
    const Eigen::Index dh = d / h;
    AttentionWeights w;
    const Matrix<Scalar> eye = Matrix<Scalar>::Identity(d, d);
    for (Eigen::Index j = 0; j < h; ++j) {
      Matrix<Scalar> slice = eye.middleCols(j * dh, dh);
      w.query.push_back(slice);
      w.key.push_back(slice);
      w.value.push_back(slice);
    }
    w.output = eye;
    return w;
  }
};

// Two-layer classification head: softmax((x U1 + b1) U2 + b2).
template <class Scalar>
struct HeadWeights {
  Matrix<Scalar> u1;     // d x w
  RowVector<Scalar> b1;  // w
  Matrix<Scalar> u2;     // w x 2
  RowVector<Scalar> b2;  // 2
};

struct FocalParams {
  double gamma = 2.0;
  double alpha = 0.75;
};

struct Probabilities {
  double p0 = 0.0;
  double p1 = 0.0;  // probability the item is referenced
};

namespace detail {

template <class Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) throw DomainError(std::string(what) + " has non-finite entries");
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

template <class Scalar>
void check_attention(const AttentionWeights<Scalar>& w, Eigen::Index d) {
  const Eigen::Index h = w.heads();
  require(h > 0, "attention needs at least one head");
  require(w.key.size() == w.query.size() && w.value.size() == w.query.size(),
          "query/key/value projection counts differ");
  require(d % h == 0, "model width " + std::to_string(d) + " not divisible by " +
                          std::to_string(h) + " heads");
  require(w.output.rows() == d && w.output.cols() == d, "output projection must be d x d");
  require_finite(w.output, "output projection");
  const Eigen::Index dh = d / h;
  for (Eigen::Index j = 0; j < h; ++j) {
    for (const auto* m : {&w.query[j], &w.key[j], &w.value[j]}) {
      require(m->rows() == d && m->cols() == dh, "head projection must be d x d/h");
      require_finite(*m, "head projection");
    }
  }
}

}  // namespace detail

// Numerically stable softmax of a row.
template <class Derived>
auto softmax(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  RowVector<Scalar> e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return RowVector<Scalar>(e / e.sum());
}

// Row-wise L2 normalization; divides by max(norm, kNormEpsilon).
template <class Derived>
auto l2_normalize(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> out = m;
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    out.row(r) /= std::max(out.row(r).norm(), static_cast<Scalar>(kNormEpsilon));
  return out;
}

// Attention distribution of each head over the n keys: an h x n matrix whose
// rows sum to one.
template <class Scalar>
Matrix<Scalar> attention_weights(const RowVector<Scalar>& query, const Matrix<Scalar>& keys,
                                 const AttentionWeights<Scalar>& w) {
  const Eigen::Index d = query.cols();
  detail::require(keys.rows() > 0, "attention over an empty key set is undefined");
  detail::require(keys.cols() == d, "key width differs from query width");
  detail::require_finite(query, "query");
  detail::require_finite(keys, "keys");
  detail::check_attention(w, d);
  const Eigen::Index h = w.heads();
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(d / h));
  Matrix<Scalar> out(h, keys.rows());
  for (Eigen::Index j = 0; j < h; ++j) {
    RowVector<Scalar> q = query * w.query[j];
    Matrix<Scalar> k = keys * w.key[j];
    out.row(j) = softmax(RowVector<Scalar>((q * k.transpose()) * scale));
  }
  return out;
}

// Column-enhanced table embedding: Norm(T + MultiHeadAttn(T, C, C)).
// `table` is 1 x d, `columns` is n x d with n >= 1.
template <class Scalar>
RowVector<Scalar> column_enhance(const RowVector<Scalar>& table, const Matrix<Scalar>& columns,
                                 const AttentionWeights<Scalar>& w) {
  const Matrix<Scalar> attn = attention_weights(table, columns, w);
  const Eigen::Index d = table.cols();
  const Eigen::Index dh = d / w.heads();
  RowVector<Scalar> concat(d);
  for (Eigen::Index j = 0; j < w.heads(); ++j)
    concat.segment(j * dh, dh) = attn.row(j) * (columns * w.value[j]);
  const RowVector<Scalar> attended = concat * w.output;
  return l2_normalize(table + attended);
}

template <class Scalar>
Probabilities classify_head(const RowVector<Scalar>& x, const HeadWeights<Scalar>& w) {
  detail::require(w.u1.rows() == x.cols(), "U1 rows must equal embedding width");
  detail::require(w.b1.cols() == w.u1.cols(), "b1 length must equal hidden width");
  detail::require(w.u2.rows() == w.u1.cols() && w.u2.cols() == 2, "U2 must be w x 2");
  detail::require(w.b2.cols() == 2, "b2 must have length 2");
  detail::require_finite(x, "embedding");
  for (const auto* m : {&w.u1, &w.u2}) detail::require_finite(*m, "head weights");
  detail::require_finite(w.b1, "b1");
  detail::require_finite(w.b2, "b2");
  const RowVector<Scalar> hidden = x * w.u1 + w.b1;
  const RowVector<Scalar> p = softmax(RowVector<Scalar>(hidden * w.u2 + w.b2));
  return {static_cast<double>(p(0)), static_cast<double>(p(1))};
}

// -alpha_t (1 - p_t)^gamma ln p_t with p_t = p1 for y = 1 and 1 - p1 for
// y = 0; alpha weights the positive class, 1 - alpha the negative.
template <class Scalar>
Scalar focal_loss(Scalar p1, int y, const FocalParams& params) {
  if (!(params.gamma >= 0.0)) throw DomainError("focal gamma must be >= 0");
  if (!(params.alpha >= 0.0 && params.alpha <= 1.0)) throw DomainError("focal alpha must lie in [0, 1]");
  if (y != 0 && y != 1) throw DomainError("label must be 0 or 1");
  if (!(p1 >= Scalar(0) && p1 <= Scalar(1))) throw DomainError("probability outside [0, 1]");
  const Scalar pt = y == 1 ? p1 : Scalar(1) - p1;
  if (pt <= Scalar(0)) throw DomainError("focal loss is infinite at p_t = 0");
  const Scalar at = static_cast<Scalar>(y == 1 ? params.alpha : 1.0 - params.alpha);
  return -at * std::pow(Scalar(1) - pt, static_cast<Scalar>(params.gamma)) * std::log(pt);
}

// Table-average plus column-average focal loss; the column average runs over
// all M columns of the schema.
template <class Scalar>
Scalar multitask_loss(std::span<const Scalar> table_probs, std::span<const int> table_labels,
                      const std::vector<std::vector<Scalar>>& column_probs,
                      const std::vector<std::vector<int>>& column_labels, const FocalParams& params) {
  const std::size_t n = table_probs.size();
  detail::require(n > 0, "no tables");
  detail::require(table_labels.size() == n, "table labels and probabilities differ in length");
  detail::require(column_probs.size() == n && column_labels.size() == n,
                  "column rows must match the table count");
  Scalar table_sum = 0;
  for (std::size_t i = 0; i < n; ++i) table_sum += focal_loss(table_probs[i], table_labels[i], params);

  Scalar column_sum = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    detail::require(column_probs[i].size() == column_labels[i].size(),
                     "column labels and probabilities differ for table " + std::to_string(i));
    for (std::size_t k = 0; k < column_probs[i].size(); ++k)
      column_sum += focal_loss(column_probs[i][k], column_labels[i][k], params);
    m += column_probs[i].size();
  }
  const Scalar table_term = table_sum / static_cast<Scalar>(n);
  return m == 0 ? table_term : table_term + column_sum / static_cast<Scalar>(m);
}

template <class Scalar>
Scalar multitask_loss(const std::vector<Scalar>& table_probs, const std::vector<int>& table_labels,
                      const std::vector<std::vector<Scalar>>& column_probs,
                      const std::vector<std::vector<int>>& column_labels, const FocalParams& params) {
  return multitask_loss<Scalar>(std::span<const Scalar>(table_probs),
                                std::span<const int>(table_labels), column_probs, column_labels,
                                params);
}

// Area under the ROC curve via midranks (Mann-Whitney U with ties counted as
// one half).
template <class Scalar>
double roc_auc(std::span<const int> labels, std::span<const Scalar> scores) {
  if (labels.size() != scores.size()) throw ShapeError("labels and scores differ in length");
  const std::size_t n = labels.size();
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DomainError("label must be 0 or 1");
    if (std::isnan(static_cast<double>(scores[i]))) throw DomainError("score is NaN");
    positives += static_cast<std::size_t>(labels[i]);
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw DomainError("AUC is undefined for single-class input");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) positive_rank_sum += midrank;
    i = j;
  }
  const double p = static_cast<double>(positives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

template <class Scalar>
double roc_auc(const std::vector<int>& labels, const std::vector<Scalar>& scores) {
  return roc_auc<Scalar>(std::span<const int>(labels), std::span<const Scalar>(scores));
}

}  // namespace t2s::kernels
