#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "cavity_anneal/fock_space.hpp"
#include "cavity_anneal/hamiltonians.hpp"

namespace cavity_anneal {

/// Linear pump ramp Jt(t) = (t / t_f) Jt_final.
struct Schedule {
  double t_f = 1000.0;
  double Jt_final = std::sqrt(5.0);

  static Schedule from(const AnnealParams& params) { return {params.t_f, params.Jt_final}; }
};

/// Throws std::out_of_range when t lies outside [0, t_f].
double linear_ramp(const Schedule& schedule, double t);

/// Raised when an evolution produces NaNs or loses unitarity.
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Sample {
  double t = 0;
  double Jt = 0;
  std::vector<double> occupations;
  std::optional<double> photons1;  // full model only
  std::optional<double> photons2;
  double fidelity = 0;             // against the model's target state
  double atomic_fidelity = 0;      // reduced lattice state vs dominant target component
  double p_two_site3 = 0;
  std::optional<double> entropy;   // full model only, nats
  double norm = 0;
  double energy = 0;               // <H(t)>
  std::optional<MeanFieldAmplitudes> alphas;  // semiclassical: amplitudes driving the next stage
};

struct TrajectoryRecord {
  Model model = Model::full;
  int cadence = 0;
  std::vector<Sample> samples;
  StateVector final_state;
  double final_fidelity = 0;
  double final_atomic_fidelity = 0;
  double final_p_two_site3 = 0;
  double final_entropy = 0;
  double max_entropy = 0;
};

/// Ground state of the model Hamiltonian at the end of the ramp.
struct TargetState {
  StateVector state;
  double energy = 0;
  double gap = 0;           // E1 - E0 of the same Hamiltonian
  bool degenerate = false;  // gap below 1e-6
};

/// Full model: ground state of h_full; adiabatic and semiclassical: ground
/// state of h_adiabatic, both at Jt = params.Jt_final.
TargetState target_state(const AnnealParams& params);

/// Ground state of the model Hamiltonian at Jt = 0.
StateVector initial_state(const AnnealParams& params);

/// Integrates i d/dt psi = H(t) psi with fixed-step classical RK4 from the
/// Jt = 0 ground state. Samples are taken every `cadence` steps and at the
/// final step.
TrajectoryRecord evolve(const AnnealParams& params, const Schedule& schedule, int cadence = 100);

/// Number of RK4 steps; throws std::invalid_argument if dt does not divide t_f.
long step_count(double t_f, double dt);

}  // namespace cavity_anneal
