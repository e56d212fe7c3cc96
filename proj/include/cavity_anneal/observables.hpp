#pragma once

#include <utility>
#include <vector>

#include "cavity_anneal/fock_space.hpp"

namespace cavity_anneal {

/// |<phi|psi>|^2. Both states must live on the same basis.
double fidelity(const StateVector& psi, const StateVector& phi);

/// <n_k> for every lattice site. The lattice is slot 0 of the state's basis.
std::vector<double> site_occupations(const StateVector& psi);

/// <a_m^dag a_m> for the two cavity modes (slots 1 and 2).
std::pair<double, double> photon_numbers(const StateVector& psi);

/// Photon-number distribution P(n), n = 0..nc, of the mode at `slot`.
std::vector<double> photon_distribution(const StateVector& psi, std::size_t slot);

/// Total weight of basis states whose lattice occupation is `occupation`.
double occupation_probability(const StateVector& psi, const Occupation& occupation);

/// Weight of both atoms sitting on the third site.
double two_atom_prob_site3(const StateVector& psi);

/// -sum lambda ln lambda over the spectrum, dropping lambda < cutoff.
double von_neumann_entropy(const DensityMatrix& rho, double cutoff = 1e-14);

/// Atom-field entanglement of a pure state on [lattice, mode1, mode2], in
/// nats, from the reduced density matrix of the two modes.
double entanglement_entropy(const StateVector& psi);

/// Same quantity from the lattice side of the cut; equal for pure states.
double atomic_entropy(const StateVector& psi);

/// <chi|rho_atoms|chi>, with chi the dominant eigenvector of the reference
/// state's reduced lattice density matrix.
double atomic_marginal_fidelity(const StateVector& psi, const StateVector& reference);

}  // namespace cavity_anneal
