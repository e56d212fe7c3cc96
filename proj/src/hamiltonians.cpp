#include "cavity_anneal/hamiltonians.hpp"

#include <string>

namespace cavity_anneal {

namespace {

constexpr double kHermitianTol = 1e-10;

void require_lattice(const FockBasis& basis, const char* what) {
  if (basis.kind() != BasisKind::lattice)
    throw std::invalid_argument(std::string(what) + " needs a lattice basis");
}

void require_atoms(const StateVector& atoms, const AnnealParams& params, const char* what) {
  if (atoms.basis().size() != 1 || !(atoms.basis().factor(0) == lattice_basis(params)))
    throw BasisMismatch(std::string(what) + ": state is not on the lattice basis");
}

}  // namespace

std::string_view to_string(Model model) {
  switch (model) {
    case Model::full: return "full";
    case Model::adiabatic: return "adiabatic";
    case Model::semiclassical: return "semiclassical";
  }
  return "unknown";
}

Model parse_model(std::string_view text) {
  if (text == "full") return Model::full;
  if (text == "adiabatic") return Model::adiabatic;
  if (text == "semiclassical") return Model::semiclassical;
  throw std::invalid_argument("unknown model '" + std::string(text) +
                              "' (expected full, adiabatic or semiclassical)");
}

void AnnealParams::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(J) || J <= 0) fail("J must be > 0");
  if (!finite(U) || U < 0) fail("U must be >= 0");
  if (!finite(V) || V < 1) fail("V must be >= 1");
  if (!finite(Jt_final) || Jt_final < 0) fail("Jt must be >= 0");
  if (!finite(Delta)) fail("Delta must be finite");
  if (!finite(kappa) || kappa <= 0) fail("kappa must be > 0");
  if (nc < 0) fail("nc must be >= 0");
  if (sites != 4) fail("the scattering patterns are defined for 4 sites");
  if (particles < 0) fail("N must be >= 0");
  if (!finite(t_f) || t_f <= 0) fail("t_f must be > 0");
  if (!finite(dt) || dt <= 0) fail("dt must be > 0");
}

ScatteringOps scattering_ops(const FockBasis& lattice, double V) {
  require_lattice(lattice, "scattering_ops");
  if (lattice.sites() != 4)
    throw std::invalid_argument("scattering_ops: mode patterns need exactly 4 sites");

  // Sign patterns of the two standing waves; site 3 carries the impurity.
  const double w1[4] = {-1.0, 1.0, -V, 1.0};
  const double w2[4] = {1.0, 1.0, -V, -1.0};
  const auto d = static_cast<Eigen::Index>(lattice.dim());
  CMatrix m1 = CMatrix::Zero(d, d);
  CMatrix m2 = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const auto& occ = lattice.state(static_cast<std::size_t>(i));
    double a = 0, b = 0;
    for (int k = 0; k < 4; ++k) {
      a += w1[k] * occ[k];
      b += w2[k] * occ[k];
    }
    m1(i, i) = a;
    m2(i, i) = b;
  }
  return {Operator(lattice, std::move(m1)), Operator(lattice, std::move(m2))};
}

Operator h_hubbard(const FockBasis& lattice, double J, double U) {
  require_lattice(lattice, "h_hubbard");
  const auto sites = static_cast<std::size_t>(lattice.sites());
  Operator h = Operator::zero(lattice);

  if (sites > 1) {
    // A 2-site ring has a single bond; do not count it twice.
    const std::size_t bonds = sites == 2 ? 1 : sites;
    for (std::size_t k = 0; k < bonds; ++k) {
      const std::size_t next = (k + 1) % sites;
      h += J * (hopping_operator(lattice, k, next) + hopping_operator(lattice, next, k));
    }
  }

  CMatrix onsite = CMatrix::Zero(static_cast<Eigen::Index>(lattice.dim()),
                                 static_cast<Eigen::Index>(lattice.dim()));
  for (std::size_t i = 0; i < lattice.dim(); ++i) {
    double e = 0;
    for (int n : lattice.state(i)) e += 0.5 * U * n * (n - 1);
    onsite(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = e;
  }
  return h + Operator(lattice, std::move(onsite));
}

FockBasis lattice_basis(const AnnealParams& params) {
  return FockBasis::lattice(params.sites, params.particles);
}

CompositeBasis full_basis(const AnnealParams& params) {
  return CompositeBasis(
      {lattice_basis(params), FockBasis::mode(params.nc), FockBasis::mode(params.nc)});
}

Operator h_full(const AnnealParams& params, double Jt) {
  const auto composite = full_basis(params);
  const auto& lattice = composite.factor(0);
  const auto& mode = composite.factor(1);
  const auto ops = scattering_ops(lattice, params.V);

  const auto a = ladder_operator(mode, 0, LadderKind::annihilate);
  const auto quadrature = a + a.adjoint();
  const auto photons = ladder_operator(mode, 0, LadderKind::number);

  Operator h = embed(h_hubbard(lattice, params.J, params.U), composite, 0);
  h -= params.Delta * (embed(photons, composite, 1) + embed(photons, composite, 2));
  h += Jt * (embed(ops.M1, composite, 0) * embed(quadrature, composite, 1) +
             embed(ops.M2, composite, 0) * embed(quadrature, composite, 2));
  return h;
}

double adiabatic_prefactor(const AnnealParams& params, double Jt) {
  return params.Delta * Jt * Jt / (params.kappa * params.kappa + params.Delta * params.Delta);
}

Operator h_adiabatic(const AnnealParams& params, double Jt) {
  const auto lattice = lattice_basis(params);
  const auto ops = scattering_ops(lattice, params.V);
  return h_hubbard(lattice, params.J, params.U) +
         adiabatic_prefactor(params, Jt) * (ops.M1 * ops.M1 + ops.M2 * ops.M2);
}

MeanFieldAmplitudes mean_field_alphas(const StateVector& atoms, const AnnealParams& params,
                                      double Jt) {
  require_atoms(atoms, params, "mean_field_alphas");
  const auto ops = scattering_ops(atoms.basis().factor(0), params.V);
  const Complex response = Complex(0, -Jt) / Complex(params.kappa, -params.Delta);
  return {response * atoms.expectation(ops.M1).real(),
          response * atoms.expectation(ops.M2).real()};
}

Operator h_semiclassical(const StateVector& atoms, const AnnealParams& params, double Jt) {
  require_atoms(atoms, params, "h_semiclassical");
  const auto& lattice = atoms.basis().factor(0);
  const auto ops = scattering_ops(lattice, params.V);
  const double m1 = atoms.expectation(ops.M1).real();
  const double m2 = atoms.expectation(ops.M2).real();
  const auto id = Operator::identity(lattice);
  const auto field = (2.0 * m1) * ops.M1 - (m1 * m1) * id + (2.0 * m2) * ops.M2 - (m2 * m2) * id;
  return h_hubbard(lattice, params.J, params.U) + adiabatic_prefactor(params, Jt) * field;
}

Eigenpair ground_state(const Operator& h) {
  if (!h.is_hermitian(kHermitianTol))
    throw std::invalid_argument("ground_state: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw std::runtime_error("ground_state: eigensolver failed");

  CVector v = solver.eigenvectors().col(0);
  Eigen::Index peak = 0;
  v.cwiseAbs().maxCoeff(&peak);
  v *= std::conj(v(peak)) / std::abs(v(peak));
  v(peak) = std::abs(v(peak));
  return {solver.eigenvalues()(0), StateVector(h.basis(), std::move(v))};
}

Eigen::VectorXd eigenvalues(const Operator& h) {
  if (!h.is_hermitian(kHermitianTol))
    throw std::invalid_argument("eigenvalues: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalues: eigensolver failed");
  return solver.eigenvalues();
}

LinearPumpHamiltonian full_hamiltonian_parts(const AnnealParams& params) {
  const auto h0 = h_full(params, 0.0);
  const auto h1 = h_full(params, 1.0) - h0;
  return {h0.basis(), h0.sparse(), h1.sparse()};
}

}  // namespace cavity_anneal
