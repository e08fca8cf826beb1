// circuit.hpp — exact PDO generation from quantum-circuit scenarios: an
// initial state, CPTP interval channels with an explicit wire partition, and
// generalized-Pauli measurement events at (wire, instant) markers.

#pragma once

#include "pdolab/pdo.hpp"

#include <string>
#include <vector>

namespace pdolab {

// A CPTP map in Kraus form on the joint space of one wire group.
struct KrausChannel {
  std::vector<Matrix> ops;
};

// Channel between two consecutive instants. Wires absent from the partition
// evolve trivially (identity padding).
struct IntervalChannel {
  std::vector<std::vector<int>> partition;  // disjoint wire groups
  std::vector<KrausChannel> kraus;          // one CPTP set per group
};

struct CircuitEvent {
  int wire = 0;
  int time = 1;  // instant index, 1 .. intervals.size() + 1
};

struct CircuitSpec {
  std::vector<int> wire_dims;
  Matrix rho0;  // state at instant 1, over all wires
  std::vector<IntervalChannel> intervals;
  std::vector<CircuitEvent> events;

  int wires() const { return static_cast<int>(wire_dims.size()); }
  int instants() const { return static_cast<int>(intervals.size()) + 1; }
};

struct CircuitCheck {
  double rho_trace_dev = 0.0;
  double rho_min_eigenvalue = 0.0;
  double rho_hermiticity_dev = 0.0;
  double kraus_completeness_dev = 0.0;
  bool events_ok = true;
  bool ok(double tol = 1e-10) const;
};

CircuitCheck check_circuit(const CircuitSpec& spec);
void require_valid(const CircuitSpec& spec, double tol = 1e-10);

// Exact expectation of the basis string {sigma_{mu_e}} over the listed events:
// branches over Lueders outcomes (eigenspace projectors, eigenvalues grouped
// within 1e-12) at each instant, propagates each branch through the interval
// channels, and sums outcome-product x branch weight in fixed lexicographic
// order. mu = 0 events contribute factor one with no projection.
double correlator(const CircuitSpec& spec, std::span<const int> paulis);

struct BuildOptions {
  int max_events = 4;
};

// Fills the full correlation tensor with `correlator`. Event axis order
// follows the circuit's event list; labels are "w<wire>t<instant>".
Pdo build_pdo(const CircuitSpec& spec, const BuildOptions& opts = {});

// Two-event temporal qubit PDO in closed form:
// (id x E)({rho x I/2, SWAP}) with SWAP = sum_mu sigma_mu x sigma_mu / 2.
// Matches build_pdo on the equivalent two-instant circuit.
Pdo temporal_two_event(const Matrix& rho, const KrausChannel& channel);

}  // namespace pdolab
