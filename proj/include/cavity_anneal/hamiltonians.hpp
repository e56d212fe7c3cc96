#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "cavity_anneal/fock_space.hpp"

namespace cavity_anneal {

enum class Model { full, adiabatic, semiclassical };

std::string_view to_string(Model model);
/// Parses "full", "adiabatic" or "semiclassical"; throws std::invalid_argument.
Model parse_model(std::string_view text);

/// Physical and numerical parameters of one annealing run. Energies are in
/// units of the recoil energy, times in inverse recoil frequency.
struct AnnealParams {
  double J = 0.1;                    // tunneling
  double U = 0.7;                    // onsite interaction
  double V = 1.1;                    // impurity depth on site 3 (>= 1)
  double Jt_final = std::sqrt(5.0);  // final pump amplitude
  double Delta = -5.0;               // cavity-pump detuning
  double kappa = 1.0;                // cavity linewidth, same for both modes
  int nc = 3;                        // photon cutoff per mode
  int sites = 4;
  int particles = 2;
  double t_f = 1000.0;
  double dt = 0.01;
  Model model = Model::full;

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;
};

/// Site-signed number sums that drive the two cavity modes.
struct ScatteringOps {
  Operator M1;
  Operator M2;
};

ScatteringOps scattering_ops(const FockBasis& lattice, double V);

/// Ring Bose-Hubbard Hamiltonian: J sum_k (b_k^dag b_{k+1} + h.c.) + U/2 sum_k n_k (n_k - 1).
Operator h_hubbard(const FockBasis& lattice, double J, double U);

FockBasis lattice_basis(const AnnealParams& params);
/// [lattice, mode1, mode2] with params.nc.
CompositeBasis full_basis(const AnnealParams& params);

/// Atom-cavity Hamiltonian with two quantized modes at pump amplitude `Jt`.
Operator h_full(const AnnealParams& params, double Jt);

/// Cavity-mediated coupling constant Delta Jt^2 / (kappa^2 + Delta^2).
double adiabatic_prefactor(const AnnealParams& params, double Jt);

/// Lattice Hamiltonian with the cavity fields eliminated as operators.
Operator h_adiabatic(const AnnealParams& params, double Jt);

struct MeanFieldAmplitudes {
  Complex alpha1;
  Complex alpha2;
};

/// Coherent field amplitudes alpha_m = -i Jt <M_m> / (kappa - i Delta).
MeanFieldAmplitudes mean_field_alphas(const StateVector& atoms, const AnnealParams& params,
                                      double Jt);

/// Mean-field lattice Hamiltonian, linearized around the state's <M_m>.
Operator h_semiclassical(const StateVector& atoms, const AnnealParams& params, double Jt);

struct Eigenpair {
  double energy;
  StateVector state;
};

/// Lowest eigenpair of a Hermitian operator. The largest-magnitude amplitude
/// of the returned vector is real and positive.
Eigenpair ground_state(const Operator& h);

/// Ascending spectrum of a Hermitian operator.
Eigen::VectorXd eigenvalues(const Operator& h);

/// Full-model Hamiltonian split as H(Jt) = fixed + Jt * pump, in sparse
/// form for time stepping.
struct LinearPumpHamiltonian {
  CompositeBasis basis;
  SparseCMatrix fixed;
  SparseCMatrix pump;
};

LinearPumpHamiltonian full_hamiltonian_parts(const AnnealParams& params);

}  // namespace cavity_anneal
