// pseudo_channel.hpp — Hermiticity- and trace-preserving maps between event
// spaces: weighted-Kraus and normalized Choi representations, marginal
// channels, the channel marginal problem via Choi duality, a no-cloning
// check, and Lindbladian dynamics.

#pragma once

#include "pdolab/marginal_types.hpp"
#include "pdolab/pdo.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdolab {

struct WeightedKraus {
  double weight = 1.0;  // real, possibly negative
  Matrix op;
};

// An HPTP map Phi(R) = sum_a lambda_a A_a R A_a^dag with
// sum_a lambda_a A_a^dag A_a = I. Quantum channels are the lambda >= 0 case.
// The normalized Choi matrix J = (1/d_in) sum_ij Phi(E_ij) x E_ij (output
// factors first) is cached at construction; it is Hermitian, trace one, and
// satisfies Tr_out J = I_in / d_in.
class PseudoChannel {
 public:
  PseudoChannel(std::vector<int> in_dims, std::vector<int> out_dims,
                std::vector<WeightedKraus> kraus, double tp_tol = 1e-10);

  const std::vector<int>& in_dims() const { return in_dims_; }
  const std::vector<int>& out_dims() const { return out_dims_; }
  const std::vector<WeightedKraus>& kraus() const { return kraus_; }
  const Matrix& choi() const { return choi_; }

  long in_dim() const { return total_dim(in_dims_); }
  long out_dim() const { return total_dim(out_dims_); }

  Matrix apply_matrix(const Matrix& m) const;
  // Contraction through the Choi matrix: d_in * Tr_in(J (I x R^T)).
  Matrix apply_via_choi(const Matrix& m) const;

  double tp_deviation() const;  // |sum lambda A^dag A - I|_max

 private:
  std::vector<int> in_dims_, out_dims_;
  std::vector<WeightedKraus> kraus_;
  Matrix choi_;
};

PseudoChannel identity_channel(std::vector<int> dims);
PseudoChannel depolarizing_channel(int d);        // R -> I/d
PseudoChannel transpose_channel();                // qubit HPTP witness
PseudoChannel unitary_channel(const Matrix& u, std::vector<int> in_dims);
PseudoChannel tensor_channel(const PseudoChannel& a, const PseudoChannel& b);

Pdo apply(const PseudoChannel& c, const Pdo& p);

// Choi state as a Pdo over out events followed by in events.
Pdo choi_pdo(const PseudoChannel& c,
             std::vector<std::string> out_labels = {},
             std::vector<std::string> in_labels = {});

PseudoChannel from_choi(const Matrix& j, std::vector<int> in_dims,
                        std::vector<int> out_dims, double tol = 1e-9);

struct NoMarginalChannelError : std::runtime_error {
  double residual;
  explicit NoMarginalChannelError(double res)
      : std::runtime_error("no marginal channel: Choi factorization residual " +
                           std::to_string(res)),
        residual(res) {}
};

// Marginal channel onto (keep_in, keep_out), defined when
// Tr_{Yc} J = J' x I_{Xc} / d_{Xc}; throws NoMarginalChannelError otherwise.
PseudoChannel marginal_channel(const PseudoChannel& c,
                               std::span<const int> keep_in,
                               std::span<const int> keep_out,
                               double tol = 1e-6);

// Natural (vectorized) representation: the matrix N with N vec(R) = vec(Phi(R)).
Matrix natural_representation(const PseudoChannel& c);

// Stinespring pair Phi(R) = Tr_aux(A R B^dag) with A = sum_a lambda_a A_a x e_a
// and B = sum_a A_a x e_a; trace preservation shows up as A^dag B = I.
struct StinespringPair {
  Matrix a, b;
  double tp_deviation = 0.0;  // |A^dag B - I|_max
};

StinespringPair stinespring_pair(const PseudoChannel& c);

// One channel of a channel-marginal scenario, with its event labels.
struct ChannelPart {
  std::vector<std::string> in_events;
  std::vector<std::string> out_events;
  PseudoChannel channel;
};

// Solution of the channel marginal problem: a Herm_1 solution family over
// Choi tensors (out events first) with the trace-preservation entries pinned
// to zero, so that every completion is an HPTP Choi state.
struct ChannelMarginalFamily {
  SolutionFamily family;
  std::vector<std::string> out_events, in_events;
  std::vector<int> out_dims, in_dims;

  PseudoChannel materialize(std::span<const double> free_values) const;
  PseudoChannel base_channel() const;
};

ChannelMarginalFamily solve_channel_marginal(std::span<const ChannelPart> parts);

struct CloningCandidateReport {
  double linearity_residual = 0.0;
  std::vector<double> clone_residuals;  // per test state, trace norm
  double mixture_residual = 0.0;        // equal mix of the first two states
  bool clones_all(double tol = 1e-9) const;
};

struct NoCloningReport {
  std::vector<CloningCandidateReport> candidates;
  bool any_universal_cloner(double tol = 1e-9) const;
};

NoCloningReport no_cloning_check(std::span<const PseudoChannel> candidates,
                                 std::span<const Pdo> test_pdos);

// Generator L(R) = -i[H, R] + sum_a g_a (L_a R L_a^dag - {L_a^dag L_a, R}/2).
// Trace-annihilating and Hermiticity-preserving for real g_a.
struct Lindbladian {
  std::vector<int> dims;         // per-event local dimensions of the state
  Matrix hamiltonian;            // Hermitian, total dimension
  std::vector<WeightedKraus> jumps;
};

Matrix apply_generator(const Lindbladian& l, const Matrix& r);

// classical 4th-order fixed-step integration of dR/dtau = L(R)
Pdo evolve(const Lindbladian& l, const Pdo& p, double tau, double dt);

struct SteadyStateOptions {
  double kernel_tol = 1e-10;
  double residual_tol = 1e-9;
};

// Kernel of the vectorized generator intersected with the trace-one Hermitian
// slice. Multi-dimensional kernels are tie-broken by the maximum Renyi-2
// space-time entropy element (the minimum Frobenius-norm point, unique).
Pdo steady_state(const Lindbladian& l, const SteadyStateOptions& opts = {});

}  // namespace pdolab
