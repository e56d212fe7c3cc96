#include "cavity_anneal/fock_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cavity_anneal {

namespace {

// Appends every tuple of `sites` entries summing to `remaining`, in
// lexicographic order.
void enumerate_occupations(int sites, int remaining, Occupation& prefix,
                           std::vector<Occupation>& out) {
  if (static_cast<int>(prefix.size()) == sites - 1) {
    prefix.push_back(remaining);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int n = 0; n <= remaining; ++n) {
    prefix.push_back(n);
    enumerate_occupations(sites, remaining - n, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::size_t> slots_of(const CompositeBasis& basis,
                                  std::span<const std::size_t> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: empty keep set");
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("partial_trace: duplicate slot in keep set");
  if (sorted.back() >= basis.size())
    throw std::out_of_range("partial_trace: slot out of range");
  return sorted;
}

struct SplitIndices {
  CompositeBasis kept;
  std::vector<std::size_t> kept_index;    // composite index -> kept index
  std::vector<std::size_t> traced_index;  // composite index -> traced index
  std::size_t traced_dim = 1;
};

SplitIndices split_indices(const CompositeBasis& basis,
                           const std::vector<std::size_t>& keep) {
  std::vector<FockBasis> kept_factors;
  std::vector<std::size_t> traced_slots;
  for (std::size_t s = 0; s < basis.size(); ++s) {
    if (std::binary_search(keep.begin(), keep.end(), s))
      kept_factors.push_back(basis.factor(s));
    else
      traced_slots.push_back(s);
  }
  SplitIndices out{CompositeBasis(std::move(kept_factors)), {}, {}, 1};
  for (auto s : traced_slots) out.traced_dim *= basis.factor(s).dim();

  out.kept_index.resize(basis.dim());
  out.traced_index.resize(basis.dim());
  std::vector<std::size_t> kept_parts(keep.size());
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const auto parts = basis.split(i);
    for (std::size_t k = 0; k < keep.size(); ++k) kept_parts[k] = parts[keep[k]];
    out.kept_index[i] = out.kept.join(kept_parts);
    std::size_t t = 0;
    for (auto s : traced_slots) t = t * basis.factor(s).dim() + parts[s];
    out.traced_index[i] = t;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// FockBasis

FockBasis FockBasis::lattice(int sites, int particles) {
  if (sites < 1) throw std::invalid_argument("lattice basis needs at least one site");
  if (particles < 0) throw std::invalid_argument("lattice basis needs N >= 0");
  FockBasis b;
  b.kind_ = BasisKind::lattice;
  b.sites_ = sites;
  b.particles_ = particles;
  b.cutoff_ = particles;
  Occupation prefix;
  enumerate_occupations(sites, particles, prefix, b.states_);
  return b;
}

FockBasis FockBasis::mode(int cutoff) {
  if (cutoff < 0) throw std::invalid_argument("mode cutoff must be >= 0");
  FockBasis b;
  b.kind_ = BasisKind::mode;
  b.sites_ = 1;
  b.cutoff_ = cutoff;
  b.particles_ = 0;
  for (int n = 0; n <= cutoff; ++n) b.states_.push_back({n});
  return b;
}

std::optional<std::size_t> FockBasis::index_of(const Occupation& occ) const {
  auto it = std::lower_bound(states_.begin(), states_.end(), occ);
  if (it == states_.end() || *it != occ) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

bool FockBasis::operator==(const FockBasis& other) const {
  return kind_ == other.kind_ && sites_ == other.sites_ &&
         particles_ == other.particles_ && cutoff_ == other.cutoff_;
}

FockBasis build_lattice_basis(int sites, int particles) {
  return FockBasis::lattice(sites, particles);
}

FockBasis build_mode_basis(int cutoff) { return FockBasis::mode(cutoff); }

// ---------------------------------------------------------------------------
// CompositeBasis

CompositeBasis::CompositeBasis(std::vector<FockBasis> factors)
    : factors_(std::move(factors)) {
  strides_.resize(factors_.size());
  dim_ = 1;
  for (std::size_t s = factors_.size(); s-- > 0;) {
    strides_[s] = dim_;
    dim_ *= factors_[s].dim();
  }
}

CompositeBasis::CompositeBasis(FockBasis single)
    : CompositeBasis(std::vector<FockBasis>{std::move(single)}) {}

std::vector<std::size_t> CompositeBasis::split(std::size_t index) const {
  std::vector<std::size_t> parts(factors_.size());
  for (std::size_t s = 0; s < factors_.size(); ++s) {
    parts[s] = index / strides_[s];
    index %= strides_[s];
  }
  return parts;
}

std::size_t CompositeBasis::join(std::span<const std::size_t> indices) const {
  if (indices.size() != factors_.size())
    throw std::invalid_argument("CompositeBasis::join: wrong number of indices");
  std::size_t index = 0;
  for (std::size_t s = 0; s < factors_.size(); ++s) index += indices[s] * strides_[s];
  return index;
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(CompositeBasis basis, CMatrix matrix)
    : basis_(std::move(basis)), matrix_(std::move(matrix)) {
  const auto d = static_cast<Eigen::Index>(basis_.dim());
  if (matrix_.rows() != d || matrix_.cols() != d)
    throw BasisMismatch("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                        std::to_string(matrix_.cols()) + ", basis dim " +
                        std::to_string(d));
}

Operator Operator::identity(const CompositeBasis& basis) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  return Operator(basis, CMatrix::Identity(d, d));
}

Operator Operator::zero(const CompositeBasis& basis) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  return Operator(basis, CMatrix::Zero(d, d));
}

bool Operator::is_hermitian(double tol) const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator Operator::adjoint() const { return Operator(basis_, matrix_.adjoint()); }

SparseCMatrix Operator::sparse(double drop_below) const {
  std::vector<Eigen::Triplet<Complex>> entries;
  for (Eigen::Index c = 0; c < matrix_.cols(); ++c)
    for (Eigen::Index r = 0; r < matrix_.rows(); ++r)
      if (std::abs(matrix_(r, c)) > drop_below) entries.emplace_back(r, c, matrix_(r, c));
  SparseCMatrix out(matrix_.rows(), matrix_.cols());
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

Operator& Operator::operator+=(const Operator& rhs) {
  if (!(basis_ == rhs.basis_)) throw BasisMismatch("operator sum: basis mismatch");
  matrix_ += rhs.matrix_;
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  if (!(basis_ == rhs.basis_)) throw BasisMismatch("operator difference: basis mismatch");
  matrix_ -= rhs.matrix_;
  return *this;
}

Operator& Operator::operator*=(Complex scale) {
  matrix_ *= scale;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  if (!(lhs.basis_ == rhs.basis_)) throw BasisMismatch("operator product: basis mismatch");
  return Operator(lhs.basis_, lhs.matrix_ * rhs.matrix_);
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

double max_abs(const Operator& op) { return op.matrix().cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------
// States

StateVector::StateVector(CompositeBasis basis, CVector amplitudes)
    : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != static_cast<Eigen::Index>(basis_.dim()))
    throw BasisMismatch("state has " + std::to_string(amplitudes_.size()) +
                        " amplitudes, basis dim " + std::to_string(basis_.dim()));
}

StateVector StateVector::basis_state(const CompositeBasis& basis, std::size_t index) {
  if (index >= basis.dim()) throw std::out_of_range("basis_state: index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(basis.dim()));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(basis, std::move(v));
}

StateVector StateVector::product(const CompositeBasis& basis,
                                 std::span<const CVector> factors) {
  if (factors.size() != basis.size())
    throw BasisMismatch("product state: factor count mismatch");
  CVector v = CVector::Ones(1);
  for (std::size_t s = 0; s < factors.size(); ++s) {
    const auto& f = factors[s];
    if (f.size() != static_cast<Eigen::Index>(basis.factor(s).dim()))
      throw BasisMismatch("product state: factor " + std::to_string(s) + " has wrong dim");
    CVector next(v.size() * f.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) next.segment(i * f.size(), f.size()) = v(i) * f;
    v = std::move(next);
  }
  return StateVector(basis, std::move(v));
}

Complex StateVector::expectation(const Operator& op) const {
  if (!(op.basis() == basis_)) throw BasisMismatch("expectation: basis mismatch");
  return amplitudes_.dot(op.matrix() * amplitudes_);
}

DensityMatrix::DensityMatrix(CompositeBasis basis, CMatrix matrix)
    : basis_(std::move(basis)), matrix_(std::move(matrix)) {
  const auto d = static_cast<Eigen::Index>(basis_.dim());
  if (matrix_.rows() != d || matrix_.cols() != d)
    throw BasisMismatch("density matrix dimension does not match basis");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return DensityMatrix(psi.basis(), psi.amplitudes() * psi.amplitudes().adjoint());
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

// ---------------------------------------------------------------------------
// Operators on single factors

Operator ladder_operator(const FockBasis& basis, std::size_t index, LadderKind kind) {
  const auto d = static_cast<Eigen::Index>(basis.dim());
  CMatrix m = CMatrix::Zero(d, d);

  if (basis.kind() == BasisKind::lattice) {
    if (index >= static_cast<std::size_t>(basis.sites()))
      throw std::out_of_range("ladder_operator: site " + std::to_string(index) +
                              " out of range");
    if (kind != LadderKind::number)
      throw std::invalid_argument(
          "ladder_operator: b and b^dagger leave the fixed-N lattice sector; "
          "use hopping_operator");
    for (Eigen::Index i = 0; i < d; ++i)
      m(i, i) = basis.state(static_cast<std::size_t>(i))[index];
    return Operator(basis, std::move(m));
  }

  if (index != 0) throw std::out_of_range("ladder_operator: a mode basis has one index (0)");
  for (Eigen::Index n = 0; n < d; ++n) {
    switch (kind) {
      case LadderKind::number:
        m(n, n) = static_cast<double>(n);
        break;
      case LadderKind::annihilate:
        if (n > 0) m(n - 1, n) = std::sqrt(static_cast<double>(n));
        break;
      case LadderKind::create:
        if (n + 1 < d) m(n + 1, n) = std::sqrt(static_cast<double>(n + 1));
        break;
    }
  }
  return Operator(basis, std::move(m));
}

Operator hopping_operator(const FockBasis& basis, std::size_t to, std::size_t from) {
  if (basis.kind() != BasisKind::lattice)
    throw std::invalid_argument("hopping_operator needs a lattice basis");
  const auto sites = static_cast<std::size_t>(basis.sites());
  if (to >= sites || from >= sites) throw std::out_of_range("hopping_operator: site out of range");

  const auto d = static_cast<Eigen::Index>(basis.dim());
  CMatrix m = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    Occupation occ = basis.state(i);
    if (occ[from] == 0) continue;
    double amp = std::sqrt(static_cast<double>(occ[from]));
    occ[from] -= 1;
    amp *= std::sqrt(static_cast<double>(occ[to] + 1));
    occ[to] += 1;
    const auto j = basis.index_of(occ);
    m(static_cast<Eigen::Index>(*j), static_cast<Eigen::Index>(i)) += amp;
  }
  return Operator(basis, std::move(m));
}

Operator embed(const Operator& op, const CompositeBasis& composite, std::size_t slot) {
  if (slot >= composite.size()) throw std::out_of_range("embed: slot out of range");
  if (op.basis().size() != 1 || !(op.basis().factor(0) == composite.factor(slot)))
    throw BasisMismatch("embed: operator basis differs from factor " + std::to_string(slot));

  std::size_t left = 1, right = 1;
  for (std::size_t s = 0; s < slot; ++s) left *= composite.factor(s).dim();
  for (std::size_t s = slot + 1; s < composite.size(); ++s) right *= composite.factor(s).dim();

  const auto d = static_cast<Eigen::Index>(composite.dim());
  const auto k = static_cast<Eigen::Index>(op.dim());
  const auto r = static_cast<Eigen::Index>(right);
  CMatrix m = CMatrix::Zero(d, d);
  for (Eigen::Index l = 0; l < static_cast<Eigen::Index>(left); ++l)
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) {
        const Complex v = op.matrix()(i, j);
        if (v == Complex{}) continue;
        const Eigen::Index row = (l * k + i) * r;
        const Eigen::Index col = (l * k + j) * r;
        for (Eigen::Index q = 0; q < r; ++q) m(row + q, col + q) = v;
      }
  return Operator(composite, std::move(m));
}

// ---------------------------------------------------------------------------
// Partial trace

DensityMatrix partial_trace(const StateVector& psi, std::span<const std::size_t> keep) {
  const auto slots = slots_of(psi.basis(), keep);
  const auto split = split_indices(psi.basis(), slots);

  // Coefficient matrix C[kept, traced]; the reduced state is C C^dagger.
  CMatrix coeff = CMatrix::Zero(static_cast<Eigen::Index>(split.kept.dim()),
                                static_cast<Eigen::Index>(split.traced_dim));
  for (std::size_t i = 0; i < psi.dim(); ++i)
    coeff(static_cast<Eigen::Index>(split.kept_index[i]),
          static_cast<Eigen::Index>(split.traced_index[i])) = psi.amplitudes()(static_cast<Eigen::Index>(i));
  return DensityMatrix(split.kept, coeff * coeff.adjoint());
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const auto slots = slots_of(rho.basis(), keep);
  const auto split = split_indices(rho.basis(), slots);

  const auto kd = static_cast<Eigen::Index>(split.kept.dim());
  CMatrix out = CMatrix::Zero(kd, kd);
  const auto d = rho.basis().dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (split.traced_index[i] == split.traced_index[j])
        out(static_cast<Eigen::Index>(split.kept_index[i]),
            static_cast<Eigen::Index>(split.kept_index[j])) +=
            rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return DensityMatrix(split.kept, std::move(out));
}

}  // namespace cavity_anneal
