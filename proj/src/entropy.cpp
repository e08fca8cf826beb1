#include "pdolab/entropy.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace pdolab {

namespace {

constexpr double kLn2 = 0.6931471805599453;

double xlog2x_abs(double lam) {
  double a = std::abs(lam);
  return a < 1e-300 ? 0.0 : a * std::log2(a);
}

// entropy of an arbitrary Hermitian matrix via |eigenvalues|
double entropy_of_matrix(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double lam : es.eigenvalues()) s -= xlog2x_abs(lam);
  return s;
}

}  // namespace

double entropy_of_values(const RealVector& values) {
  double s = 0.0;
  for (double lam : values) s -= xlog2x_abs(lam);
  return s;
}

double entropy(const Pdo& p) { return entropy_of_values(spectrum(p).values); }

double shannon(const RealVector& p) {
  double s = 0.0;
  for (double x : p) s -= xlog2x_abs(x);
  return s;
}

double renyi(const Pdo& p, double alpha) {
  if (alpha <= 0.0 || alpha == 1.0)
    throw std::invalid_argument("renyi: order must be positive and != 1");
  RealVector values = spectrum(p).values;
  double acc = 0.0;
  for (double lam : values) acc += std::pow(std::abs(lam), alpha);
  return std::log2(acc) / (1.0 - alpha);
}

ConditionalMutual conditional_mutual(const Pdo& joint,
                                     std::span<const std::string> part_a) {
  std::vector<std::string> part_b;
  for (const auto& label : joint.labels) {
    bool in_a = std::find(part_a.begin(), part_a.end(), label) != part_a.end();
    if (!in_a) part_b.push_back(label);
  }
  if (part_a.empty() || part_b.empty())
    throw std::invalid_argument("conditional_mutual: split must be a proper bipartition");
  for (const auto& label : part_a)
    if (joint.event_index(label) < 0)
      throw std::invalid_argument("conditional_mutual: unknown event '" + label + "'");

  const double s_ab = entropy(joint);
  const double s_a = entropy(partial_trace(joint, part_a));
  const double s_b = entropy(partial_trace(joint, part_b));
  return {s_ab - s_b, s_a + s_b - s_ab};
}

double relative_entropy(const Pdo& p, const Pdo& q, double eps) {
  if (p.dims != q.dims) throw std::invalid_argument("relative_entropy: dims mismatch");

  Spectrum sp = spectrum(p);
  double term1 = 0.0;
  for (double lam : sp.values) term1 += xlog2x_abs(lam);

  Eigen::SelfAdjointEigenSolver<Matrix> eq(to_matrix(q));
  RealVector mags = eq.eigenvalues().cwiseAbs();
  if (mags.minCoeff() < eps) mags.array() += eps;

  const Matrix abs_p = hermitian_abs(to_matrix(p));
  double term2 = 0.0;
  for (long j = 0; j < mags.size(); ++j) {
    Vector phi = eq.eigenvectors().col(j);
    term2 += std::log2(mags[j]) * (phi.adjoint() * abs_p * phi).value().real();
  }
  return term1 - term2;
}

double klein_residual(const Pdo& p, const Pdo& q, double eps) {
  return relative_entropy(p, q, eps) -
         2.0 * (causality_C(p) - causality_C(q)) / kLn2;
}

double entropy_identity_residual(const Pdo& p) {
  RealVector lam = spectrum(p).values;
  const double norm1 = lam.cwiseAbs().sum();
  const double c = (norm1 - 1.0) / 2.0;
  const double f = std::log2(norm1);
  RealVector pv = lam.cwiseAbs() / norm1;
  return std::abs(entropy_of_values(lam) - (2.0 * c + 1.0) * (shannon(pv) - f));
}

EntropyReport entropy_report(const Pdo& p, std::span<const double> alphas) {
  EntropyReport r;
  RealVector lam = spectrum(p).values;
  const double norm1 = lam.cwiseAbs().sum();
  r.S = entropy_of_values(lam);
  r.C = (norm1 - 1.0) / 2.0;
  r.F = std::log2(norm1);
  r.p_vec = lam.cwiseAbs() / norm1;
  for (double a : alphas) r.renyi.emplace_back(a, renyi(p, a));
  r.identity_residual = std::abs(r.S - (2.0 * r.C + 1.0) * (shannon(r.p_vec) - r.F));
  return r;
}

double subadditivity_residual(const Pdo& p, std::span<const std::string> part_a,
                              double eps) {
  std::vector<std::string> part_b;
  for (const auto& label : p.labels)
    if (std::find(part_a.begin(), part_a.end(), label) == part_a.end())
      part_b.push_back(label);
  if (part_a.empty() || part_b.empty())
    throw std::invalid_argument("subadditivity_residual: need a proper bipartition");

  // reorder so the A events come first
  std::vector<std::string> order(part_a.begin(), part_a.end());
  order.insert(order.end(), part_b.begin(), part_b.end());
  Pdo joint = partial_trace(p, order);
  Pdo ra = partial_trace(p, part_a);
  Pdo rb = partial_trace(p, part_b);

  const Matrix abs_ab = hermitian_abs(to_matrix(joint));
  const Matrix abs_marg = kron(hermitian_abs(to_matrix(ra)), hermitian_abs(to_matrix(rb)));

  Eigen::SelfAdjointEigenSolver<Matrix> em(abs_marg);
  RealVector mags = em.eigenvalues().cwiseMax(0.0);
  mags.array() += eps;
  Matrix log_marg = Matrix::Zero(abs_marg.rows(), abs_marg.cols());
  for (long j = 0; j < mags.size(); ++j)
    log_marg += std::log2(mags[j]) *
                (em.eigenvectors().col(j) * em.eigenvectors().col(j).adjoint());

  const Matrix diff = abs_ab - abs_marg;
  const double delta = (diff * log_marg).trace().real();
  const double linear = diff.trace().real() / kLn2;

  return entropy(ra) + entropy(rb) - entropy(joint) - delta - linear;
}

InequalityReport check_inequalities(const Pdo& p, const Pdo& q, double mix_alpha,
                                    std::uint64_t seed) {
  InequalityReport r;

  // unitary invariance of S(p)
  {
    std::mt19937_64 rng(seed);
    Matrix m = to_matrix(p);
    Matrix u = random_unitary(static_cast<int>(m.rows()), rng);
    r.unitary_invariance_dev =
        std::abs(entropy_of_matrix(u * m * u.adjoint()) - entropy(p));
  }

  // weak additivity of p x q (labels separated internally)
  {
    std::vector<std::string> la, lb;
    for (int i = 0; i < p.events(); ++i) la.push_back("p" + std::to_string(i));
    for (int i = 0; i < q.events(); ++i) lb.push_back("q" + std::to_string(i));
    Pdo prod = tensor_product(relabeled(p, la), relabeled(q, lb));
    const double lhs = entropy(prod);
    const double rhs = (2.0 * causality_C(q) + 1.0) * entropy(p) +
                       (2.0 * causality_C(p) + 1.0) * entropy(q);
    r.weak_additivity_dev = std::abs(lhs - rhs);
  }

  // weak concavity needs matching spaces
  {
    if (p.dims != q.dims)
      throw std::invalid_argument("check_inequalities: dims mismatch for concavity");
    Matrix mixabs = mix_alpha * hermitian_abs(to_matrix(p)) +
                    (1.0 - mix_alpha) * hermitian_abs(to_matrix(q));
    r.weak_concavity_residual = entropy_of_matrix(mixabs) -
                                (mix_alpha * entropy(p) + (1.0 - mix_alpha) * entropy(q));
  }

  if (p.events() >= 2) {
    const std::string first[] = {p.labels[0]};
    r.weak_subadditivity_residual =
        subadditivity_residual(p, std::span<const std::string>(first));
  }

  r.klein_residual = klein_residual(p, q);
  return r;
}

}  // namespace pdolab
