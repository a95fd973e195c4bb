#include <cmath>
#include <functional>
#include <ostream>
#include <random>

#include "t2s/cli.hpp"
#include "t2s/kernels.hpp"

namespace t2s::cli {

namespace {

using kernels::Matrix;
using kernels::RowVector;

Matrix<double> random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix<double> m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

kernels::AttentionWeights<double> random_attention(std::mt19937_64& rng, Eigen::Index d, Eigen::Index h) {
  kernels::AttentionWeights<double> w;
  for (Eigen::Index j = 0; j < h; ++j) {
    w.query.push_back(random_matrix(rng, d, d / h));
    w.key.push_back(random_matrix(rng, d, d / h));
    w.value.push_back(random_matrix(rng, d, d / h));
  }
  w.output = random_matrix(rng, d, d);
  return w;
}

double pair_count_auc(const std::vector<int>& y, const std::vector<double>& s) {
  double hits = 0, pairs = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1;
        hits += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return hits / pairs;
}

}  // namespace

bool kernels_selfcheck(std::ostream& out, unsigned seed, std::size_t trials) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> small(1, 6);
  std::uniform_real_distribution<double> unit(0.01, 0.99);
  bool all = true;

  auto check = [&](const char* name, const std::function<bool()>& body) {
    bool ok = true;
    try {
      for (std::size_t t = 0; t < trials && ok; ++t) ok = body();
    } catch (const std::exception&) {
      ok = false;
    }
    out << (ok ? "PASS " : "FAIL ") << name << '\n';
    all = all && ok;
  };

  check("attention rows sum to one", [&] {
    const Eigen::Index h = small(rng), d = h * small(rng), n = small(rng);
    const auto w = random_attention(rng, d, h);
    const Matrix<double> a = kernels::attention_weights<double>(random_matrix(rng, 1, d), random_matrix(rng, n, d), w);
    return ((a.rowwise().sum().array() - 1.0).abs() < 1e-12).all();
  });
  check("column_enhance rows are unit length", [&] {
    const Eigen::Index h = small(rng), d = h * small(rng), n = small(rng);
    const auto w = random_attention(rng, d, h);
    const RowVector<double> t = random_matrix(rng, 1, d);
    return std::abs(kernels::column_enhance<double>(t, random_matrix(rng, n, d), w).norm() - 1.0) < 1e-9;
  });
  check("classify_head sums to one", [&] {
    const Eigen::Index d = small(rng), hidden = small(rng);
    kernels::HeadWeights<double> w{random_matrix(rng, d, hidden), random_matrix(rng, 1, hidden),
                                   random_matrix(rng, hidden, 2), random_matrix(rng, 1, 2)};
    const auto p = kernels::classify_head<double>(random_matrix(rng, 1, d), w);
    return std::abs(p.p0 + p.p1 - 1.0) < 1e-12 && p.p0 >= 0 && p.p1 >= 0;
  });
  check("focal loss decreases in p_t", [&] {
    double a = unit(rng), b = unit(rng);
    if (a == b) return true;
    if (a > b) std::swap(a, b);
    const kernels::FocalParams fp{2.0, 0.75};
    return kernels::focal_loss(a, 1, fp) > kernels::focal_loss(b, 1, fp) &&
           kernels::focal_loss(1.0 - a, 0, fp) > kernels::focal_loss(1.0 - b, 0, fp);
  });
  check("multitask loss matches a direct double loop", [&] {
    const kernels::FocalParams fp{2.0, 0.75};
    const int n = 1 + small(rng) % 5;
    std::vector<double> tp;
    std::vector<int> tl;
    std::vector<std::vector<double>> cp;
    std::vector<std::vector<int>> cl;
    std::bernoulli_distribution coin(0.5);
    double tsum = 0, csum = 0;
    std::size_t m = 0;
    for (int i = 0; i < n; ++i) {
      tp.push_back(unit(rng));
      tl.push_back(coin(rng) ? 1 : 0);
      const double pt = tl.back() ? tp.back() : 1 - tp.back();
      tsum += -(tl.back() ? 0.75 : 0.25) * (1 - pt) * (1 - pt) * std::log(pt);
      cp.emplace_back();
      cl.emplace_back();
      for (int k = 0, nk = small(rng); k < nk; ++k) {
        cp.back().push_back(unit(rng));
        cl.back().push_back(coin(rng) ? 1 : 0);
        const double q = cl.back().back() ? cp.back().back() : 1 - cp.back().back();
        csum += -(cl.back().back() ? 0.75 : 0.25) * (1 - q) * (1 - q) * std::log(q);
        ++m;
      }
    }
    const double expected = tsum / n + csum / static_cast<double>(m);
    return std::abs(kernels::multitask_loss(tp, tl, cp, cl, fp) - expected) < 1e-12;
  });
  check("roc_auc matches pair counting and is rank invariant", [&] {
    std::uniform_int_distribution<int> len(2, 30), tie(0, 9);
    std::vector<int> y(static_cast<std::size_t>(len(rng)));
    std::vector<double> s(y.size()), t(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] = static_cast<int>(i % 2);
      s[i] = tie(rng) / 10.0;
      t[i] = std::exp(3.0 * s[i]) - 5.0;
    }
    std::shuffle(y.begin(), y.end(), rng);
    const double a = kernels::roc_auc(y, s);
    return std::abs(a - pair_count_auc(y, s)) < 1e-12 && std::abs(a - kernels::roc_auc(y, t)) < 1e-12;
  });
  return all;
}

}  // namespace t2s::cli
