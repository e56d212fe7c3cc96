#include "cavity_anneal/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "cavity_anneal/observables.hpp"

namespace cavity_anneal {

namespace {

constexpr double kNormDriftLimit = 1e-6;
constexpr double kDegeneracyGap = 1e-6;

// Right-hand side H(t) psi for one model. Implementations may depend on psi
// (mean-field model) but hold no state between calls.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual void apply(double Jt, const CVector& psi, CVector& out) const = 0;
};

class FullGenerator final : public Generator {
 public:
  explicit FullGenerator(const AnnealParams& params) {
    const auto parts = full_hamiltonian_parts(params);
    fixed_ = parts.fixed;
    pump_ = parts.pump;
  }

  void apply(double Jt, const CVector& psi, CVector& out) const override {
    out.noalias() = fixed_ * psi;
    out.noalias() += Jt * (pump_ * psi);
  }

 private:
  Eigen::SparseMatrix<Complex, Eigen::RowMajor> fixed_;
  Eigen::SparseMatrix<Complex, Eigen::RowMajor> pump_;
};

class AdiabaticGenerator final : public Generator {
 public:
  explicit AdiabaticGenerator(const AnnealParams& params) : params_(params) {
    const auto lattice = lattice_basis(params);
    const auto ops = scattering_ops(lattice, params.V);
    hubbard_ = h_hubbard(lattice, params.J, params.U).matrix();
    coupling_ = (ops.M1 * ops.M1 + ops.M2 * ops.M2).matrix().diagonal();
  }

  void apply(double Jt, const CVector& psi, CVector& out) const override {
    out.noalias() = hubbard_ * psi;
    out += adiabatic_prefactor(params_, Jt) * coupling_.cwiseProduct(psi);
  }

 private:
  AnnealParams params_;
  CMatrix hubbard_;
  CVector coupling_;
};

class SemiclassicalGenerator final : public Generator {
 public:
  explicit SemiclassicalGenerator(const AnnealParams& params) : params_(params) {
    const auto lattice = lattice_basis(params);
    const auto ops = scattering_ops(lattice, params.V);
    hubbard_ = h_hubbard(lattice, params.J, params.U).matrix();
    m1_ = ops.M1.matrix().diagonal().real();
    m2_ = ops.M2.matrix().diagonal().real();
  }

  // <M_m> of a possibly unnormalized stage vector.
  std::pair<double, double> mean_scattering(const CVector& psi) const {
    const Eigen::VectorXd w = psi.cwiseAbs2();
    const double n = w.sum();
    return {w.dot(m1_) / n, w.dot(m2_) / n};
  }

  void apply(double Jt, const CVector& psi, CVector& out) const override {
    const auto [e1, e2] = mean_scattering(psi);
    const double g = adiabatic_prefactor(params_, Jt);
    out.noalias() = hubbard_ * psi;
    const Eigen::VectorXd field =
        (2.0 * e1) * m1_ + (2.0 * e2) * m2_ -
        Eigen::VectorXd::Constant(m1_.size(), e1 * e1 + e2 * e2);
    out += g * field.cast<Complex>().cwiseProduct(psi);
  }

 private:
  AnnealParams params_;
  CMatrix hubbard_;
  Eigen::VectorXd m1_;
  Eigen::VectorXd m2_;
};

std::unique_ptr<Generator> make_generator(const AnnealParams& params) {
  switch (params.model) {
    case Model::full: return std::make_unique<FullGenerator>(params);
    case Model::adiabatic: return std::make_unique<AdiabaticGenerator>(params);
    case Model::semiclassical: return std::make_unique<SemiclassicalGenerator>(params);
  }
  throw std::invalid_argument("unknown model");
}

Operator model_hamiltonian(const AnnealParams& params, double Jt) {
  return params.model == Model::full ? h_full(params, Jt) : h_adiabatic(params, Jt);
}

Sample observe(const AnnealParams& params, const Generator& generator,
               const TargetState& target, double t, double Jt, const StateVector& psi) {
  Sample s;
  s.t = t;
  s.Jt = Jt;
  s.norm = psi.norm();
  s.occupations = site_occupations(psi);
  s.fidelity = fidelity(psi, target.state);
  s.p_two_site3 = two_atom_prob_site3(psi);

  CVector hpsi(psi.amplitudes().size());
  generator.apply(Jt, psi.amplitudes(), hpsi);
  s.energy = psi.amplitudes().dot(hpsi).real();

  if (params.model == Model::full) {
    const auto [n1, n2] = photon_numbers(psi);
    s.photons1 = n1;
    s.photons2 = n2;
    s.entropy = entanglement_entropy(psi);
    s.atomic_fidelity = atomic_marginal_fidelity(psi, target.state);
  } else {
    s.atomic_fidelity = s.fidelity;
  }
  if (params.model == Model::semiclassical) s.alphas = mean_field_alphas(psi, params, Jt);
  return s;
}

void check_sample(const Sample& current, const Sample* previous, const AnnealParams& params) {
  if (!std::isfinite(current.norm)) {
    std::ostringstream msg;
    msg << "non-finite amplitudes at t=" << current.t << " (dt=" << params.dt << ")";
    throw NumericalAbort(msg.str());
  }
  if (previous && std::abs(current.norm - previous->norm) > kNormDriftLimit) {
    std::ostringstream msg;
    msg << "norm drifted by " << std::abs(current.norm - previous->norm) << " between t="
        << previous->t << " and t=" << current.t << "; reduce dt (currently " << params.dt << ")";
    throw NumericalAbort(msg.str());
  }
}

}  // namespace

double linear_ramp(const Schedule& schedule, double t) {
  if (!(t >= 0.0 && t <= schedule.t_f))
    throw std::out_of_range("linear_ramp: t outside [0, t_f]");
  return t / schedule.t_f * schedule.Jt_final;
}

long step_count(double t_f, double dt) {
  if (!(t_f > 0) || !(dt > 0)) throw std::invalid_argument("t_f and dt must be positive");
  const double ratio = t_f / dt;
  const long steps = std::lround(ratio);
  if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * ratio)
    throw std::invalid_argument("dt must divide t_f");
  return steps;
}

TargetState target_state(const AnnealParams& params) {
  const auto h = model_hamiltonian(params, params.Jt_final);
  const auto spectrum = eigenvalues(h);
  auto ground = ground_state(h);
  const double gap = spectrum.size() > 1 ? spectrum(1) - spectrum(0) : 0.0;
  return {std::move(ground.state), ground.energy, gap, spectrum.size() > 1 && gap < kDegeneracyGap};
}

StateVector initial_state(const AnnealParams& params) {
  return ground_state(model_hamiltonian(params, 0.0)).state;
}

TrajectoryRecord evolve(const AnnealParams& params, const Schedule& schedule, int cadence) {
  params.validate();
  if (cadence < 1) throw std::invalid_argument("cadence must be >= 1");
  if (!(schedule.t_f > 0)) throw std::invalid_argument("schedule t_f must be > 0");
  const long steps = step_count(schedule.t_f, params.dt);
  const double dt = schedule.t_f / static_cast<double>(steps);

  AnnealParams final_params = params;
  final_params.Jt_final = schedule.Jt_final;
  const auto target = target_state(final_params);
  const auto generator = make_generator(params);

  StateVector state = initial_state(params);
  CVector& psi = state.amplitudes();
  const Eigen::Index d = psi.size();
  CVector k1(d), k2(d), k3(d), k4(d), stage(d);
  const Complex minus_i(0.0, -1.0);

  auto pump = [&](double fraction) { return fraction * schedule.Jt_final; };

  TrajectoryRecord record{params.model, cadence, {}, state, 0, 0, 0, 0, 0};
  record.samples.push_back(observe(params, *generator, target, 0.0, 0.0, state));

  for (long n = 0; n < steps; ++n) {
    const double s0 = static_cast<double>(n) / static_cast<double>(steps);
    const double s_half = (static_cast<double>(n) + 0.5) / static_cast<double>(steps);
    const double s1 = static_cast<double>(n + 1) / static_cast<double>(steps);

    // Every stage uses H - E, with E = <H> at the step start. The shift only
    // rotates the global phase but keeps the RK4 amplification factor of the
    // occupied levels close to one.
    generator->apply(pump(s0), psi, k1);
    const double shift = psi.dot(k1).real() / psi.squaredNorm();
    k1 = minus_i * (k1 - shift * psi);
    stage = psi + (0.5 * dt) * k1;
    generator->apply(pump(s_half), stage, k2);
    k2 = minus_i * (k2 - shift * stage);
    stage = psi + (0.5 * dt) * k2;
    generator->apply(pump(s_half), stage, k3);
    k3 = minus_i * (k3 - shift * stage);
    stage = psi + dt * k3;
    generator->apply(pump(s1), stage, k4);
    k4 = minus_i * (k4 - shift * stage);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const long done = n + 1;
    if (done % cadence == 0 || done == steps) {
      const double t = done == steps ? schedule.t_f : s1 * schedule.t_f;
      record.samples.push_back(observe(params, *generator, target, t, pump(s1), state));
      check_sample(record.samples.back(), &record.samples[record.samples.size() - 2], params);
    }
  }

  const Sample& last = record.samples.back();
  record.final_state = state;
  record.final_fidelity = last.fidelity;
  record.final_atomic_fidelity = last.atomic_fidelity;
  record.final_p_two_site3 = last.p_two_site3;
  record.final_entropy = last.entropy.value_or(0.0);
  for (const auto& s : record.samples)
    record.max_entropy = std::max(record.max_entropy, s.entropy.value_or(0.0));
  return record;
}

}  // namespace cavity_anneal
