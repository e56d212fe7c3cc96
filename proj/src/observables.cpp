#include "cavity_anneal/observables.hpp"

#include <array>
#include <cmath>
#include <string>

namespace cavity_anneal {

namespace {

const FockBasis& lattice_factor(const StateVector& psi) {
  const auto& f = psi.basis().factor(0);
  if (f.kind() != BasisKind::lattice)
    throw BasisMismatch("expected the lattice in slot 0 of the state basis");
  return f;
}

void require_modes(const StateVector& psi, const char* what) {
  const auto& b = psi.basis();
  if (b.size() != 3 || b.factor(1).kind() != BasisKind::mode ||
      b.factor(2).kind() != BasisKind::mode)
    throw BasisMismatch(std::string(what) + " needs a [lattice, mode, mode] state");
}

}  // namespace

double fidelity(const StateVector& psi, const StateVector& phi) {
  if (!(psi.basis() == phi.basis())) throw BasisMismatch("fidelity: basis mismatch");
  return std::norm(phi.amplitudes().dot(psi.amplitudes()));
}

std::vector<double> site_occupations(const StateVector& psi) {
  const auto& lattice = lattice_factor(psi);
  std::vector<double> occ(static_cast<std::size_t>(lattice.sites()), 0.0);
  const auto& basis = psi.basis();
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const double w = std::norm(psi.amplitudes()(static_cast<Eigen::Index>(i)));
    if (w == 0) continue;
    const auto& state = lattice.state(basis.split(i)[0]);
    for (std::size_t k = 0; k < occ.size(); ++k) occ[k] += w * state[k];
  }
  return occ;
}

std::vector<double> photon_distribution(const StateVector& psi, std::size_t slot) {
  if (slot >= psi.basis().size() || psi.basis().factor(slot).kind() != BasisKind::mode)
    throw BasisMismatch("photon_distribution: slot " + std::to_string(slot) + " is not a mode");
  std::vector<double> p(psi.basis().factor(slot).dim(), 0.0);
  for (std::size_t i = 0; i < psi.dim(); ++i)
    p[psi.basis().split(i)[slot]] += std::norm(psi.amplitudes()(static_cast<Eigen::Index>(i)));
  return p;
}

std::pair<double, double> photon_numbers(const StateVector& psi) {
  require_modes(psi, "photon_numbers");
  std::array<double, 2> n{};
  for (std::size_t m = 0; m < 2; ++m) {
    const auto p = photon_distribution(psi, m + 1);
    for (std::size_t k = 0; k < p.size(); ++k) n[m] += static_cast<double>(k) * p[k];
  }
  return {n[0], n[1]};
}

double occupation_probability(const StateVector& psi, const Occupation& occupation) {
  const auto& lattice = lattice_factor(psi);
  const auto target = lattice.index_of(occupation);
  if (!target) return 0.0;
  double p = 0;
  for (std::size_t i = 0; i < psi.dim(); ++i)
    if (psi.basis().split(i)[0] == *target)
      p += std::norm(psi.amplitudes()(static_cast<Eigen::Index>(i)));
  return p;
}

double two_atom_prob_site3(const StateVector& psi) {
  const auto& lattice = lattice_factor(psi);
  if (lattice.sites() < 3) throw std::invalid_argument("two_atom_prob_site3: fewer than 3 sites");
  Occupation occ(static_cast<std::size_t>(lattice.sites()), 0);
  occ[2] = 2;
  return occupation_probability(psi, occ);
}

double von_neumann_entropy(const DensityMatrix& rho, double cutoff) {
  const auto lambda = rho.eigenvalues();
  double s = 0;
  for (double l : lambda)
    if (l > cutoff) s -= l * std::log(l);
  return s;
}

double entanglement_entropy(const StateVector& psi) {
  require_modes(psi, "entanglement_entropy");
  const std::array<std::size_t, 2> modes{1, 2};
  return von_neumann_entropy(partial_trace(psi, modes));
}

double atomic_entropy(const StateVector& psi) {
  require_modes(psi, "atomic_entropy");
  const std::array<std::size_t, 1> atoms{0};
  return von_neumann_entropy(partial_trace(psi, atoms));
}

double atomic_marginal_fidelity(const StateVector& psi, const StateVector& reference) {
  if (!(psi.basis() == reference.basis()))
    throw BasisMismatch("atomic_marginal_fidelity: basis mismatch");
  lattice_factor(psi);
  const std::array<std::size_t, 1> atoms{0};
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(partial_trace(reference, atoms).matrix());
  const CVector chi = solver.eigenvectors().col(solver.eigenvalues().size() - 1);
  return (chi.adjoint() * partial_trace(psi, atoms).matrix() * chi)(0, 0).real();
}

}  // namespace cavity_anneal
