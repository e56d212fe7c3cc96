#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace cavity_anneal {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SparseCMatrix = Eigen::SparseMatrix<Complex>;

/// Occupation numbers of a lattice state (one entry per site) or of a
/// single mode (one entry, the photon number).
using Occupation = std::vector<int>;

enum class BasisKind { lattice, mode };

/// Ordered occupation-number basis of one subsystem.
///
/// Lattice bases hold the fixed-particle-number sector of L sites with N
/// bosons; mode bases hold the photon numbers 0..nc of one truncated
/// oscillator. States are stored in lexicographic order of the tuples.
class FockBasis {
 public:
  static FockBasis lattice(int sites, int particles);
  static FockBasis mode(int cutoff);

  BasisKind kind() const { return kind_; }
  std::size_t dim() const { return states_.size(); }
  int sites() const { return sites_; }
  int particles() const { return particles_; }
  int cutoff() const { return cutoff_; }

  const std::vector<Occupation>& states() const { return states_; }
  const Occupation& state(std::size_t i) const { return states_.at(i); }
  std::optional<std::size_t> index_of(const Occupation& occ) const;

  bool operator==(const FockBasis& other) const;

 private:
  FockBasis() = default;

  BasisKind kind_ = BasisKind::lattice;
  int sites_ = 0;
  int particles_ = 0;
  int cutoff_ = 0;
  std::vector<Occupation> states_;
};

/// Tensor product of FockBasis factors. Kronecker order follows the factor
/// order, so the last factor is the fastest-running index. A single
/// FockBasis converts implicitly into a one-factor composite.
class CompositeBasis {
 public:
  explicit CompositeBasis(std::vector<FockBasis> factors);
  CompositeBasis(FockBasis single);  // NOLINT(google-explicit-constructor)

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return factors_.size(); }
  const FockBasis& factor(std::size_t slot) const { return factors_.at(slot); }
  const std::vector<FockBasis>& factors() const { return factors_; }

  /// Per-factor indices of a composite index.
  std::vector<std::size_t> split(std::size_t index) const;
  std::size_t join(std::span<const std::size_t> indices) const;

  bool operator==(const CompositeBasis& other) const = default;

 private:
  std::vector<FockBasis> factors_;
  std::vector<std::size_t> strides_;
  std::size_t dim_ = 1;
};

class BasisMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Square matrix acting on a basis.
class Operator {
 public:
  Operator(CompositeBasis basis, CMatrix matrix);

  static Operator identity(const CompositeBasis& basis);
  static Operator zero(const CompositeBasis& basis);

  const CompositeBasis& basis() const { return basis_; }
  const CMatrix& matrix() const { return matrix_; }
  std::size_t dim() const { return basis_.dim(); }

  bool is_hermitian(double tol = 1e-12) const;
  Operator adjoint() const;
  SparseCMatrix sparse(double drop_below = 0.0) const;

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  Operator& operator*=(Complex scale);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator lhs, Complex scale) { return lhs *= scale; }
  friend Operator operator*(Complex scale, Operator rhs) { return rhs *= scale; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);

 private:
  CompositeBasis basis_;
  CMatrix matrix_;
};

Operator commutator(const Operator& a, const Operator& b);

/// Largest entrywise modulus, used for operator identity checks.
double max_abs(const Operator& op);

class StateVector {
 public:
  StateVector(CompositeBasis basis, CVector amplitudes);

  /// Normalized basis vector at `index`.
  static StateVector basis_state(const CompositeBasis& basis, std::size_t index);
  /// Product state in factor order, each factor given as its amplitudes.
  static StateVector product(const CompositeBasis& basis, std::span<const CVector> factors);

  const CompositeBasis& basis() const { return basis_; }
  const CVector& amplitudes() const { return amplitudes_; }
  CVector& amplitudes() { return amplitudes_; }
  std::size_t dim() const { return basis_.dim(); }
  double norm() const { return amplitudes_.norm(); }

  Complex expectation(const Operator& op) const;

 private:
  CompositeBasis basis_;
  CVector amplitudes_;
};

class DensityMatrix {
 public:
  DensityMatrix(CompositeBasis basis, CMatrix matrix);

  static DensityMatrix pure(const StateVector& psi);

  const CompositeBasis& basis() const { return basis_; }
  const CMatrix& matrix() const { return matrix_; }
  Complex trace() const { return matrix_.trace(); }

  /// Ascending real eigenvalues.
  Eigen::VectorXd eigenvalues() const;

 private:
  CompositeBasis basis_;
  CMatrix matrix_;
};

FockBasis build_lattice_basis(int sites, int particles);
FockBasis build_mode_basis(int cutoff);

enum class LadderKind { create, annihilate, number };

/// Single-site ladder or number operator.
///
/// On a lattice basis only `number` is available: b and b† leave the
/// fixed-N sector, so bilinears go through hopping_operator instead.
Operator ladder_operator(const FockBasis& basis, std::size_t index, LadderKind kind);

/// b_to† b_from on a lattice basis.
Operator hopping_operator(const FockBasis& basis, std::size_t to, std::size_t from);

/// op ⊗ 1 on every other factor of `composite`.
Operator embed(const Operator& op, const CompositeBasis& composite, std::size_t slot);

/// Reduced density matrix on the `keep` slots (kept in ascending order).
DensityMatrix partial_trace(const StateVector& psi, std::span<const std::size_t> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

}  // namespace cavity_anneal
