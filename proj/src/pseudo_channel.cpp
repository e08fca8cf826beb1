#include "pdolab/pseudo_channel.hpp"

#include "pdolab/marginal.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace pdolab {

PseudoChannel::PseudoChannel(std::vector<int> in_dims, std::vector<int> out_dims,
                             std::vector<WeightedKraus> kraus, double tp_tol)
    : in_dims_(std::move(in_dims)), out_dims_(std::move(out_dims)),
      kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw std::invalid_argument("PseudoChannel: empty Kraus set");
  const long din = in_dim(), dout = out_dim();
  for (const auto& wk : kraus_)
    if (wk.op.rows() != dout || wk.op.cols() != din)
      throw std::invalid_argument("PseudoChannel: Kraus operator size mismatch");

  double dev = tp_deviation();
  if (dev > tp_tol)
    throw std::invalid_argument("PseudoChannel: not trace preserving, deviation " +
                                std::to_string(dev));

  choi_ = Matrix::Zero(dout * din, dout * din);
  for (const auto& wk : kraus_) {
    Vector v = Vector::Zero(dout * din);
    for (long o = 0; o < dout; ++o)
      for (long i = 0; i < din; ++i) v[o * din + i] = wk.op(o, i);
    choi_ += (wk.weight / static_cast<double>(din)) * (v * v.adjoint());
  }
}

double PseudoChannel::tp_deviation() const {
  const long din = in_dim();
  Matrix acc = Matrix::Zero(din, din);
  for (const auto& wk : kraus_) acc += wk.weight * (wk.op.adjoint() * wk.op);
  return max_abs(acc - Matrix::Identity(din, din));
}

Matrix PseudoChannel::apply_matrix(const Matrix& m) const {
  const long din = in_dim(), dout = out_dim();
  if (m.rows() != din || m.cols() != din)
    throw std::invalid_argument("PseudoChannel: input dimension mismatch");
  Matrix out = Matrix::Zero(dout, dout);
  for (const auto& wk : kraus_) out += wk.weight * (wk.op * m * wk.op.adjoint());
  return out;
}

Matrix PseudoChannel::apply_via_choi(const Matrix& m) const {
  const long din = in_dim(), dout = out_dim();
  Matrix prod = choi_ * kron(Matrix::Identity(dout, dout), m.transpose());
  const int dims[] = {static_cast<int>(dout), static_cast<int>(din)};
  const int keep[] = {0};
  return static_cast<double>(din) *
         partial_trace_dense(prod, std::span<const int>(dims), std::span<const int>(keep));
}

PseudoChannel identity_channel(std::vector<int> dims) {
  const long d = total_dim(dims);
  return PseudoChannel(dims, dims, {{1.0, Matrix::Identity(d, d)}});
}

PseudoChannel depolarizing_channel(int d) {
  std::vector<WeightedKraus> ks;
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Matrix e = Matrix::Zero(d, d);
      e(i, j) = s;
      ks.push_back({1.0, e});
    }
  return PseudoChannel({d}, {d}, std::move(ks));
}

PseudoChannel transpose_channel() {
  const OperatorBasis& b = cached_basis(2);
  std::vector<WeightedKraus> ks = {{0.5, b.ops[0]},   // I
                                   {0.5, b.ops[1]},   // X
                                   {0.5, b.ops[3]},   // Z
                                   {-0.5, b.ops[2]}}; // Y
  return PseudoChannel({2}, {2}, std::move(ks));
}

PseudoChannel unitary_channel(const Matrix& u, std::vector<int> dims) {
  return PseudoChannel(dims, dims, {{1.0, u}});
}

PseudoChannel tensor_channel(const PseudoChannel& a, const PseudoChannel& b) {
  std::vector<int> in = a.in_dims(), out = a.out_dims();
  in.insert(in.end(), b.in_dims().begin(), b.in_dims().end());
  out.insert(out.end(), b.out_dims().begin(), b.out_dims().end());
  std::vector<WeightedKraus> ks;
  for (const auto& ka : a.kraus())
    for (const auto& kb : b.kraus())
      ks.push_back({ka.weight * kb.weight, kron(ka.op, kb.op)});
  return PseudoChannel(std::move(in), std::move(out), std::move(ks));
}

Pdo apply(const PseudoChannel& c, const Pdo& p) {
  if (p.dims != c.in_dims())
    throw std::invalid_argument("apply: Pdo dims do not match channel input");
  Matrix out = c.apply_matrix(to_matrix(p));
  std::vector<std::string> labels =
      (c.out_dims() == c.in_dims()) ? p.labels : std::vector<std::string>{};
  return from_matrix(out, c.out_dims(), std::move(labels), 1e-8);
}

Pdo choi_pdo(const PseudoChannel& c, std::vector<std::string> out_labels,
             std::vector<std::string> in_labels) {
  if (out_labels.empty())
    for (std::size_t i = 0; i < c.out_dims().size(); ++i)
      out_labels.push_back("out" + std::to_string(i));
  if (in_labels.empty())
    for (std::size_t i = 0; i < c.in_dims().size(); ++i)
      in_labels.push_back("in" + std::to_string(i));
  std::vector<int> dims = c.out_dims();
  dims.insert(dims.end(), c.in_dims().begin(), c.in_dims().end());
  std::vector<std::string> labels = std::move(out_labels);
  labels.insert(labels.end(), in_labels.begin(), in_labels.end());
  return from_matrix(c.choi(), std::move(dims), std::move(labels), 1e-9);
}

PseudoChannel from_choi(const Matrix& j, std::vector<int> in_dims,
                        std::vector<int> out_dims, double tol) {
  const long din = total_dim(in_dims), dout = total_dim(out_dims);
  if (j.rows() != dout * din || j.cols() != dout * din)
    throw std::invalid_argument("from_choi: matrix size mismatch");
  if (!is_hermitian(j, tol))
    throw std::invalid_argument("from_choi: Choi matrix is not Hermitian");

  const int dims[] = {static_cast<int>(dout), static_cast<int>(din)};
  const int keep_in[] = {1};
  Matrix tr_out = partial_trace_dense(j, std::span<const int>(dims),
                                      std::span<const int>(keep_in));
  double tp_dev = max_abs(tr_out - Matrix::Identity(din, din) / static_cast<double>(din));
  if (tp_dev > tol)
    throw std::invalid_argument("from_choi: trace preservation violated, deviation " +
                                std::to_string(tp_dev));

  Eigen::SelfAdjointEigenSolver<Matrix> es(j);
  std::vector<WeightedKraus> ks;
  for (long k = 0; k < es.eigenvalues().size(); ++k) {
    const double e = es.eigenvalues()[k];
    if (std::abs(e) < 1e-12) continue;
    Matrix a(dout, din);
    for (long o = 0; o < dout; ++o)
      for (long i = 0; i < din; ++i) a(o, i) = es.eigenvectors()(o * din + i, k);
    a *= std::sqrt(static_cast<double>(din) * std::abs(e));
    ks.push_back({e < 0 ? -1.0 : 1.0, std::move(a)});
  }
  return PseudoChannel(std::move(in_dims), std::move(out_dims), std::move(ks),
                       std::max(1e-9, 100.0 * tol));
}

PseudoChannel marginal_channel(const PseudoChannel& c, std::span<const int> keep_in,
                               std::span<const int> keep_out, double tol) {
  const int m = static_cast<int>(c.out_dims().size());
  const int n = static_cast<int>(c.in_dims().size());
  std::vector<int> ev_dims = c.out_dims();
  ev_dims.insert(ev_dims.end(), c.in_dims().begin(), c.in_dims().end());

  auto validate = [](std::span<const int> v, int count) {
    std::set<int> seen;
    for (int x : v) {
      if (x < 0 || x >= count) throw std::invalid_argument("marginal_channel: bad index");
      if (!seen.insert(x).second)
        throw std::invalid_argument("marginal_channel: duplicate index");
    }
  };
  validate(keep_in, n);
  validate(keep_out, m);
  if (keep_in.empty() || keep_out.empty())
    throw std::invalid_argument("marginal_channel: keep sets must be nonempty");

  // trace away the dropped output events only
  std::vector<int> keep_l;
  for (int o : keep_out) keep_l.push_back(o);
  for (int i = 0; i < n; ++i) keep_l.push_back(m + i);
  Matrix l = partial_trace_dense(c.choi(), ev_dims, keep_l);

  // the candidate marginal Choi additionally drops the unkept inputs
  std::vector<int> keep_j;
  for (int o : keep_out) keep_j.push_back(o);
  for (int i : keep_in) keep_j.push_back(m + i);
  Matrix jm = partial_trace_dense(c.choi(), ev_dims, keep_j);

  std::vector<int> dropped_in;
  for (int i = 0; i < n; ++i)
    if (std::find(keep_in.begin(), keep_in.end(), i) == keep_in.end())
      dropped_in.push_back(i);

  long d_drop = 1;
  for (int i : dropped_in) d_drop *= c.in_dims()[i];

  // factorization residual: L should equal J' x I/d over the dropped inputs
  Matrix candidate = kron(jm, Matrix::Identity(d_drop, d_drop) / static_cast<double>(d_drop));
  // candidate subsystem order: keep_out, keep_in, dropped_in; permute to L's
  // order keep_out, all inputs ascending
  std::vector<int> cand_events;  // event ids in candidate order
  for (int o : keep_out) cand_events.push_back(o);
  for (int i : keep_in) cand_events.push_back(m + i);
  for (int i : dropped_in) cand_events.push_back(m + i);
  std::vector<int> cand_dims;
  for (int e : cand_events) cand_dims.push_back(ev_dims[e]);

  std::vector<int> l_events;
  for (int o : keep_out) l_events.push_back(o);
  for (int i = 0; i < n; ++i) l_events.push_back(m + i);

  std::vector<int> perm(l_events.size());
  for (std::size_t i = 0; i < l_events.size(); ++i) {
    auto it = std::find(cand_events.begin(), cand_events.end(), l_events[i]);
    perm[i] = static_cast<int>(it - cand_events.begin());
  }
  Matrix aligned = permute_subsystems(candidate, cand_dims, perm);
  double residual = max_abs(l - aligned);
  if (residual > tol) throw NoMarginalChannelError(residual);

  std::vector<int> new_in, new_out;
  for (int i : keep_in) new_in.push_back(c.in_dims()[i]);
  for (int o : keep_out) new_out.push_back(c.out_dims()[o]);
  return from_choi(jm, std::move(new_in), std::move(new_out), 1e-8);
}

Matrix natural_representation(const PseudoChannel& c) {
  const long din = c.in_dim(), dout = c.out_dim();
  Matrix n = Matrix::Zero(dout * dout, din * din);
  for (const auto& wk : c.kraus()) {
    // vec(A R A^dag) = (A x conj(A)) vec(R) in row-major vec convention
    n += wk.weight * kron(wk.op, wk.op.conjugate());
  }
  return n;
}

StinespringPair stinespring_pair(const PseudoChannel& c) {
  const long din = c.in_dim(), dout = c.out_dim();
  const long aux = static_cast<long>(c.kraus().size());
  StinespringPair pair;
  pair.a = Matrix::Zero(dout * aux, din);
  pair.b = Matrix::Zero(dout * aux, din);
  for (long k = 0; k < aux; ++k) {
    const auto& wk = c.kraus()[k];
    // block row k corresponds to the auxiliary basis vector e_k
    pair.a.middleRows(k * dout, dout) = wk.weight * wk.op;
    pair.b.middleRows(k * dout, dout) = wk.op;
  }
  pair.tp_deviation = max_abs(pair.a.adjoint() * pair.b - Matrix::Identity(din, din));
  return pair;
}

PseudoChannel ChannelMarginalFamily::materialize(std::span<const double> free_values) const {
  Pdo completed = family.completed(free_values);
  return from_choi(to_matrix(completed), in_dims, out_dims, 1e-8);
}

PseudoChannel ChannelMarginalFamily::base_channel() const {
  return materialize(std::vector<double>(family.free_count(), 0.0));
}

ChannelMarginalFamily solve_channel_marginal(std::span<const ChannelPart> parts) {
  if (parts.empty()) throw std::invalid_argument("solve_channel_marginal: no parts");

  ChannelMarginalFamily out;
  auto add_events = [](std::vector<std::string>& labels, std::vector<int>& dims,
                       const std::vector<std::string>& ev, const std::vector<int>& ed) {
    for (std::size_t i = 0; i < ev.size(); ++i) {
      auto it = std::find(labels.begin(), labels.end(), ev[i]);
      if (it == labels.end()) {
        labels.push_back(ev[i]);
        dims.push_back(ed[i]);
      } else if (dims[it - labels.begin()] != ed[i]) {
        throw std::invalid_argument("solve_channel_marginal: inconsistent event dims");
      }
    }
  };
  for (const auto& part : parts) {
    if (part.out_events.size() != part.channel.out_dims().size() ||
        part.in_events.size() != part.channel.in_dims().size())
      throw std::invalid_argument("solve_channel_marginal: event label arity mismatch");
    add_events(out.out_events, out.out_dims, part.out_events, part.channel.out_dims());
    add_events(out.in_events, out.in_dims, part.in_events, part.channel.in_dims());
  }
  for (const auto& label : out.in_events)
    if (std::find(out.out_events.begin(), out.out_events.end(), label) !=
        out.out_events.end())
      throw std::invalid_argument("solve_channel_marginal: in/out labels must differ");

  std::vector<ScenarioPart> state_parts;
  for (const auto& part : parts) {
    Pdo choi = choi_pdo(part.channel, part.out_events, part.in_events);
    state_parts.push_back({choi.labels, choi});
  }
  std::vector<std::string> order = out.out_events;
  order.insert(order.end(), out.in_events.begin(), out.in_events.end());
  MarginalScenario scenario = MarginalScenario::create(std::move(state_parts), 1e-9, order);
  out.family = solve_herm1(scenario);

  // trace preservation: free entries with all output indices zero are pinned
  // to zero, so Tr_out of any completion stays I/d_in
  const int n_out = static_cast<int>(out.out_events.size());
  std::vector<std::vector<int>> kept_indices;
  std::vector<std::size_t> kept_flat;
  for (std::size_t k = 0; k < out.family.free_count(); ++k) {
    const auto& tuple = out.family.free_indices[k];
    bool out_zero = true;
    for (int e = 0; e < n_out && out_zero; ++e) out_zero = (tuple[e] == 0);
    if (out_zero) {
      out.family.fixed_mask[out.family.free_flat[k]] = 1;
      out.family.base_point[out.family.free_flat[k]] = 0.0;
    } else {
      kept_indices.push_back(tuple);
      kept_flat.push_back(out.family.free_flat[k]);
    }
  }
  out.family.free_indices = std::move(kept_indices);
  out.family.free_flat = std::move(kept_flat);
  return out;
}

bool CloningCandidateReport::clones_all(double tol) const {
  for (double r : clone_residuals)
    if (r > tol) return false;
  return true;
}

bool NoCloningReport::any_universal_cloner(double tol) const {
  for (const auto& c : candidates)
    if (c.clones_all(tol) && c.mixture_residual <= tol) return true;
  return false;
}

NoCloningReport no_cloning_check(std::span<const PseudoChannel> candidates,
                                 std::span<const Pdo> test_pdos) {
  if (test_pdos.size() < 2)
    throw std::invalid_argument("no_cloning_check: need at least two test states");

  NoCloningReport report;
  for (const auto& c : candidates) {
    if (c.out_dims().size() != 2 * c.in_dims().size() ||
        c.out_dim() != c.in_dim() * c.in_dim())
      throw std::invalid_argument("no_cloning_check: candidate must map one copy to two");

    CloningCandidateReport cr;
    Matrix m1 = to_matrix(test_pdos[0]);
    Matrix m2 = to_matrix(test_pdos[1]);
    Matrix mixed = 0.5 * m1 + 0.5 * m2;
    cr.linearity_residual = trace_norm(
        c.apply_matrix(mixed) - 0.5 * c.apply_matrix(m1) - 0.5 * c.apply_matrix(m2));
    for (const auto& p : test_pdos) {
      Matrix m = to_matrix(p);
      cr.clone_residuals.push_back(trace_norm(c.apply_matrix(m) - kron(m, m)));
    }
    cr.mixture_residual = trace_norm(c.apply_matrix(mixed) - kron(mixed, mixed));
    report.candidates.push_back(std::move(cr));
  }
  return report;
}

Matrix apply_generator(const Lindbladian& l, const Matrix& r) {
  const Cplx i(0.0, 1.0);
  Matrix out = -i * (l.hamiltonian * r - r * l.hamiltonian);
  for (const auto& jump : l.jumps) {
    Matrix kk = jump.op.adjoint() * jump.op;
    out += jump.weight * (jump.op * r * jump.op.adjoint() - 0.5 * (kk * r + r * kk));
  }
  return out;
}

namespace {

void validate_lindbladian(const Lindbladian& l) {
  const long d = total_dim(l.dims);
  if (l.hamiltonian.rows() != d || l.hamiltonian.cols() != d)
    throw std::invalid_argument("Lindbladian: Hamiltonian size mismatch");
  if (!is_hermitian(l.hamiltonian, 1e-10))
    throw std::invalid_argument("Lindbladian: Hamiltonian must be Hermitian");
  for (const auto& jump : l.jumps)
    if (jump.op.rows() != d || jump.op.cols() != d)
      throw std::invalid_argument("Lindbladian: jump operator size mismatch");
}

}  // namespace

Pdo evolve(const Lindbladian& l, const Pdo& p, double tau, double dt) {
  validate_lindbladian(l);
  if (dt <= 0) throw std::invalid_argument("evolve: step must be positive");
  if (p.matrix_dim() != total_dim(l.dims))
    throw std::invalid_argument("evolve: state dimension mismatch");

  Matrix r = to_matrix(p);
  if (tau > 0) {
    const long steps = std::max<long>(1, static_cast<long>(std::ceil(tau / dt - 1e-12)));
    const double h = tau / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
      Matrix k1 = apply_generator(l, r);
      Matrix k2 = apply_generator(l, r + 0.5 * h * k1);
      Matrix k3 = apply_generator(l, r + 0.5 * h * k2);
      Matrix k4 = apply_generator(l, r + h * k3);
      r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return from_matrix(r, p.dims, p.labels, 1e-8);
}

Pdo steady_state(const Lindbladian& l, const SteadyStateOptions& opts) {
  validate_lindbladian(l);
  const long d = total_dim(l.dims);
  const OperatorBasis& basis = cached_basis(static_cast<int>(d));
  const int nb = basis.count();

  // generator as a real matrix over the Hermitian operator basis
  Eigen::MatrixXd gen(nb, nb);
  for (int mu = 0; mu < nb; ++mu) {
    Matrix image = apply_generator(l, basis.ops[mu]);
    for (int nu = 0; nu < nb; ++nu)
      gen(nu, mu) = (image * basis.ops[nu]).trace().real() / static_cast<double>(d);
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(gen);
  lu.setThreshold(opts.kernel_tol);
  Eigen::MatrixXd kernel = lu.kernel();
  if (kernel.cols() == 0 || kernel.norm() < opts.kernel_tol)
    throw std::runtime_error("steady_state: generator has trivial kernel");

  // trace-one slice: coordinate 0 (identity component) equals one.
  Eigen::VectorXd k0 = kernel.row(0).transpose();
  if (k0.cwiseAbs().maxCoeff() < 1e-12)
    throw std::runtime_error("steady_state: kernel contains no trace-one element");

  // minimum-norm point of the affine slice = maximum Renyi-2 entropy element
  Eigen::MatrixXd gram = kernel.transpose() * kernel;
  Eigen::VectorXd y = gram.ldlt().solve(k0);
  Eigen::VectorXd alpha = y / k0.dot(y);
  Eigen::VectorXd coords = kernel * alpha;

  Matrix r = Matrix::Zero(d, d);
  for (int mu = 0; mu < nb; ++mu) r += coords[mu] * basis.ops[mu];
  r /= static_cast<double>(d);

  double residual = max_abs(apply_generator(l, r));
  if (residual > opts.residual_tol)
    throw std::runtime_error("steady_state: residual " + std::to_string(residual));
  return from_matrix(r, l.dims, {}, 1e-8);
}

}  // namespace pdolab
