#include "tsfloquet/matpow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tsfloquet {

namespace {

double scale_of(const Matrix& M) { return std::max(M.norm(), std::numeric_limits<double>::min()); }

struct Cluster {
  std::vector<Complex> members;
  [[nodiscard]] Complex center() const {
    Complex sum(0.0, 0.0);
    for (Complex z : members) sum += z;
    return sum / static_cast<double>(members.size());
  }
};

double cluster_gap(const Cluster& a, const Cluster& b) {
  double gap = std::numeric_limits<double>::infinity();
  for (Complex x : a.members) {
    for (Complex y : b.members) gap = std::min(gap, std::abs(x - y));
  }
  return gap;
}

/// A Jordan block of size k perturbed at machine precision splits its
/// eigenvalue by about (C eps)^{1/k} ||M||; merging at that scale is benign.
double split_scale(std::size_t k, double norm) {
  constexpr double kSplitConstant = 1e3;
  const double eps = std::numeric_limits<double>::epsilon();
  return std::pow(kSplitConstant * eps, 1.0 / static_cast<double>(k)) * norm;
}

/// Single-linkage components of `clusters` under links shorter than `link`.
std::vector<std::vector<std::size_t>> components(const std::vector<Cluster>& clusters, double link) {
  std::vector<std::size_t> parent(clusters.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    for (std::size_t j = i + 1; j < clusters.size(); ++j) {
      if (cluster_gap(clusters[i], clusters[j]) < link) parent[find(j)] = find(i);
    }
  }
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::ptrdiff_t> slot(clusters.size(), -1);
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return out;
}

std::vector<Cluster> merge_components(const std::vector<Cluster>& clusters,
                                      const std::vector<std::vector<std::size_t>>& groups) {
  std::vector<Cluster> out;
  for (const auto& g : groups) {
    Cluster c;
    for (std::size_t i : g) {
      c.members.insert(c.members.end(), clusters[i].members.begin(), clusters[i].members.end());
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Cluster> cluster_eigenvalues(const Eigen::VectorXcd& values, double norm,
                                         const SpectralOptions& opts, bool& ambiguous) {
  std::vector<Cluster> clusters;
  for (Eigen::Index i = 0; i < values.size(); ++i) clusters.push_back({{values(i)}});
  clusters = merge_components(clusters, components(clusters, opts.cluster_tol * norm));

  // A group of k eigenvalues linked within split_scale(k) is a split
  // defective eigenvalue. Larger groups get the looser threshold.
  for (auto k = static_cast<std::size_t>(values.size()); k >= 2 && clusters.size() > 1; --k) {
    std::vector<std::vector<std::size_t>> groups;
    for (auto& g : components(clusters, split_scale(k, norm))) {
      std::size_t members = 0;
      for (std::size_t i : g) members += clusters[i].members.size();
      if (g.size() > 1 && members >= k) {
        if (opts.strict) {
          throw Error(ErrorCode::ClusteringAmbiguous,
                      std::to_string(members) + " eigenvalues lie within the rounding split scale");
        }
        ambiguous = true;
        groups.push_back(std::move(g));
      } else {
        for (std::size_t i : g) groups.push_back({i});
      }
    }
    clusters = merge_components(clusters, groups);
  }
  return clusters;
}

Matrix matrix_poly_power(const Matrix& base, int exponent) {
  Matrix out = Matrix::Identity(base.rows(), base.cols());
  for (int i = 0; i < exponent; ++i) out = out * base;
  return out;
}

/// Sum_i P_i f_i(lambda_i) Sum_{j < m_i} c_ij (N_i / lambda_i)^j.
template <class Coeffs>
Matrix spectral_sum(const SpectralData& s, Coeffs&& coeffs) {
  const Eigen::Index n = s.dim();
  const Matrix I = Matrix::Identity(n, n);
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < s.clusters(); ++i) {
    const Complex lambda = s.eigenvalues[i];
    const int m = s.multiplicities[i];
    const std::vector<Complex> c = coeffs(i, m);
    const Matrix ratio = (s.matrix - lambda * I) / lambda;
    Matrix term = I;
    Matrix series = c[0] * I;
    for (int j = 1; j < m; ++j) {
      term = term * ratio;
      series += c[static_cast<std::size_t>(j)] * term;
    }
    out += s.projections[i] * series;
  }
  return out;
}

}  // namespace

std::vector<Complex> falling_binomials(Complex r, int count) {
  std::vector<Complex> c(static_cast<std::size_t>(std::max(count, 0)));
  if (count <= 0) return c;
  c[0] = 1.0;
  for (int j = 1; j < count; ++j) {
    c[static_cast<std::size_t>(j)] =
        c[static_cast<std::size_t>(j - 1)] * (r - static_cast<double>(j - 1)) / static_cast<double>(j);
  }
  return c;
}

SpectralData spectral_decompose(const Matrix& M, const SpectralOptions& opts) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw Error(ErrorCode::ConfigError, "spectral_decompose needs a nonempty square matrix");
  }
  if (!M.allFinite()) throw Error(ErrorCode::NonFiniteValue, "matrix has non-finite entries");
  const double norm = scale_of(M);
  if (std::abs(M.determinant()) <= kSnap) {
    throw Error(ErrorCode::SingularMatrix, "matrix is singular at the snap tolerance");
  }

  Eigen::ComplexEigenSolver<Matrix> solver(M, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularMatrix, "eigenvalue iteration did not converge");
  }

  SpectralData s;
  s.matrix = M;
  const auto clusters = cluster_eigenvalues(solver.eigenvalues(), norm, opts, s.ambiguous);
  for (const Cluster& c : clusters) {
    const Complex lambda = c.center();
    if (std::abs(lambda) <= kSnap * norm) {
      throw Error(ErrorCode::SingularMatrix, "zero eigenvalue");
    }
    s.eigenvalues.push_back(lambda);
    s.multiplicities.push_back(static_cast<int>(c.members.size()));
    s.logs.push_back(std::log(lambda));
  }

  // P_i = a_i(M) b_i(M) with b_i = prod_{j != i} (x - lambda_j)^{m_j} and a_i
  // the degree m_i - 1 Taylor polynomial of 1 / b_i about lambda_i.
  const Eigen::Index n = M.rows();
  const Matrix I = Matrix::Identity(n, n);
  const std::size_t k = s.eigenvalues.size();
  for (std::size_t i = 0; i < k; ++i) {
    const int mi = s.multiplicities[i];
    const Complex li = s.eigenvalues[i];
    std::vector<Complex> a(static_cast<std::size_t>(mi), Complex(0.0, 0.0));
    a[0] = 1.0;
    Matrix b = I;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      const int mj = s.multiplicities[j];
      const Complex d = li - s.eigenvalues[j];
      // (d + u)^{-m} = d^{-m} sum_q binom(-m, q) (u / d)^q
      std::vector<Complex> factor(static_cast<std::size_t>(mi));
      const auto binom = falling_binomials(Complex(-mj, 0.0), mi);
      for (int q = 0; q < mi; ++q) {
        factor[static_cast<std::size_t>(q)] =
            std::pow(d, -mj) * binom[static_cast<std::size_t>(q)] * std::pow(d, -q);
      }
      std::vector<Complex> product(static_cast<std::size_t>(mi), Complex(0.0, 0.0));
      for (int p = 0; p < mi; ++p) {
        for (int q = 0; p + q < mi; ++q) {
          product[static_cast<std::size_t>(p + q)] +=
              a[static_cast<std::size_t>(p)] * factor[static_cast<std::size_t>(q)];
        }
      }
      a = std::move(product);
      b = b * matrix_poly_power(M - s.eigenvalues[j] * I, mj);
    }
    const Matrix shifted = M - li * I;
    Matrix a_of_M = Matrix::Zero(n, n);
    Matrix term = I;
    for (int q = 0; q < mi; ++q) {
      if (q > 0) term = term * shifted;
      a_of_M += a[static_cast<std::size_t>(q)] * term;
    }
    s.projections.push_back(a_of_M * b);
  }
  return s;
}

Matrix real_power(const SpectralData& s, double r) {
  if (r == 0.0) return Matrix::Identity(s.dim(), s.dim());
  if (r == 1.0) return s.matrix;
  return complex_power(s, Complex(r, 0.0));
}

Matrix real_power(const Matrix& M, double r) {
  if (r == 0.0) return Matrix::Identity(M.rows(), M.cols());
  return real_power(spectral_decompose(M), r);
}

Matrix complex_power(const SpectralData& s, Complex r) {
  return spectral_sum(s, [&](std::size_t i, int m) {
    auto c = falling_binomials(r, m);
    const Complex lr = std::exp(r * s.logs[i]);
    for (auto& v : c) v *= lr;
    return c;
  });
}

Matrix matrix_log(const SpectralData& s) {
  return spectral_sum(s, [&](std::size_t i, int m) {
    std::vector<Complex> c(static_cast<std::size_t>(m));
    c[0] = s.logs[i];
    for (int j = 1; j < m; ++j) {
      c[static_cast<std::size_t>(j)] = (j % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(j);
    }
    return c;
  });
}

double ProjectionResiduals::max() const noexcept {
  return std::max({completeness, idempotence, orthogonality});
}

ProjectionResiduals projection_residuals(const SpectralData& s) {
  const Eigen::Index n = s.dim();
  ProjectionResiduals r;
  Matrix sum = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < s.clusters(); ++i) {
    const Matrix& P = s.projections[i];
    sum += P;
    r.idempotence = std::max(r.idempotence, (P * P - P).norm());
    for (std::size_t j = 0; j < s.clusters(); ++j) {
      if (i != j) r.orthogonality = std::max(r.orthogonality, (P * s.projections[j]).norm());
    }
  }
  r.completeness = (sum - Matrix::Identity(n, n)).norm();
  return r;
}

int geometric_multiplicity(const Matrix& M, Complex lambda, double rank_tol) {
  const Eigen::Index n = M.rows();
  const Matrix shifted = M - lambda * Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(shifted);
  const double threshold = rank_tol * scale_of(M);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > threshold) ++rank;
  }
  return static_cast<int>(n) - rank;
}

}  // namespace tsfloquet
