#include "levy/potentials.hpp"

#include "levy/error.hpp"

#include <cmath>

namespace levy {

std::string to_string(InteractionKind kind) {
  switch (kind) {
    case InteractionKind::None:
      return "none";
    case InteractionKind::LennardJones:
      return "lennard_jones";
    case InteractionKind::PowerLaw:
      return "power_law";
    case InteractionKind::Coulomb:
      return "coulomb";
    case InteractionKind::LogCoulomb:
      return "log_coulomb";
  }
  return "unknown";
}

std::string to_string(PairNormalization norm) {
  return norm == PairNormalization::PairSum ? "pair_sum" : "mean_field";
}

InteractionKind parse_interaction_kind(const std::string& name) {
  if (name == "none") return InteractionKind::None;
  if (name == "lennard_jones" || name == "lj") return InteractionKind::LennardJones;
  if (name == "power_law") return InteractionKind::PowerLaw;
  if (name == "coulomb") return InteractionKind::Coulomb;
  if (name == "log_coulomb") return InteractionKind::LogCoulomb;
  throw ParameterError("unknown interaction kind '" + name + "'");
}

PairNormalization parse_normalization(const std::string& name) {
  if (name == "pair_sum") return PairNormalization::PairSum;
  if (name == "mean_field") return PairNormalization::MeanField;
  throw ParameterError("unknown interaction normalization '" + name + "'");
}

PotentialModel::PotentialModel(std::size_t n, std::size_t d, Confinement confinement,
                               Interaction interaction, PairNormalization normalization,
                               double offset)
    : n_(n),
      d_(d),
      confinement_(std::move(confinement)),
      interaction_(std::move(interaction)),
      normalization_(normalization),
      offset_(offset) {
  if (n_ == 0 || d_ == 0) throw ParameterError("particle count and dimension must be positive");
  if (!(confinement_.c0 >= 0.0)) throw ParameterError("confinement strength must be >= 0");
  if (!(confinement_.exponent > 0.0))
    throw ParameterError("confinement exponent must be positive");
  if (!std::isfinite(offset_)) throw ParameterError("potential offset must be finite");
  switch (interaction_.kind) {
    case InteractionKind::LennardJones:
      if (!(interaction_.c1 > 0.0) || !(interaction_.c2 >= 0.0))
        throw ParameterError("Lennard-Jones needs c1 > 0 and c2 >= 0");
      break;
    case InteractionKind::PowerLaw:
      if (!(interaction_.strength > 0.0) || !(interaction_.power > 0.0))
        throw ParameterError("power-law interaction needs positive strength and exponent");
      break;
    case InteractionKind::Coulomb:
      if (d_ < 3) throw ParameterError("Coulomb interaction needs dimension >= 3");
      if (!(interaction_.strength > 0.0)) throw ParameterError("Coulomb strength must be > 0");
      break;
    case InteractionKind::LogCoulomb:
      if (d_ != 2) throw ParameterError("logarithmic interaction needs dimension 2");
      if (!(interaction_.strength > 0.0)) throw ParameterError("log strength must be > 0");
      break;
    case InteractionKind::None:
      break;
  }
}

void PotentialModel::check_dim(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != n_ * d_)
    throw ParameterError("configuration has dimension " + std::to_string(x.size()) +
                         ", expected " + std::to_string(n_ * d_));
}

bool PotentialModel::singular() const {
  return interaction_.kind != InteractionKind::None;
}

double PotentialModel::unordered_pair_weight() const {
  return normalization_ == PairNormalization::PairSum ? 1.0 : 2.0 / static_cast<double>(n_);
}

bool PotentialModel::has_mean_field_decomposition() const {
  if (normalization_ != PairNormalization::MeanField) return false;
  if (interaction_.perturbation) return false;
  switch (interaction_.kind) {
    case InteractionKind::None:
    case InteractionKind::PowerLaw:
    case InteractionKind::Coulomb:
    case InteractionKind::LogCoulomb:
      return true;
    case InteractionKind::LennardJones:
      return false;
  }
  return false;
}

double PotentialModel::pair_length_scale() const {
  if (interaction_.kind == InteractionKind::LennardJones && interaction_.c2 > 0.0)
    return std::pow(2.0 * interaction_.c1 / interaction_.c2, 1.0 / 6.0);
  return 1.0;
}

RadialJet PotentialModel::pair_jet(double r) const {
  RadialJet j;
  const Interaction& in = interaction_;
  switch (in.kind) {
    case InteractionKind::None:
      break;
    case InteractionKind::LennardJones: {
      const double i1 = 1.0 / r;
      const double i6 = std::pow(i1, 6);
      const double i12 = i6 * i6;
      j.k = in.c1 * i12 - in.c2 * i6;
      j.k1 = (-12.0 * in.c1 * i12 + 6.0 * in.c2 * i6) * i1;
      j.k2 = (156.0 * in.c1 * i12 - 42.0 * in.c2 * i6) * i1 * i1;
      break;
    }
    case InteractionKind::PowerLaw: {
      const double b = in.power;
      const double rb = in.strength * std::pow(r, -b);
      j.k = rb;
      j.k1 = -b * rb / r;
      j.k2 = b * (b + 1.0) * rb / (r * r);
      break;
    }
    case InteractionKind::Coulomb: {
      const double p = static_cast<double>(d_) - 2.0;
      const double rp = in.strength * std::pow(r, -p);
      j.k = rp;
      j.k1 = -p * rp / r;
      j.k2 = p * (p + 1.0) * rp / (r * r);
      break;
    }
    case InteractionKind::LogCoulomb:
      j.k = -in.strength * std::log(r);
      j.k1 = -in.strength / r;
      j.k2 = in.strength / (r * r);
      break;
  }
  if (in.perturbation) {
    j.k += in.perturbation->value(r);
    j.k1 += in.perturbation->d1(r);
    j.k2 += in.perturbation->d2(r);
  }
  return j;
}

double PotentialModel::confinement_value(const Vector& u) const {
  double s = 0.0;
  if (confinement_.c0 != 0.0)
    s = confinement_.c0 * std::pow(1.0 + u.squaredNorm(), 0.5 * confinement_.exponent);
  if (confinement_.perturbation) s += confinement_.perturbation->value(u);
  return s;
}

Vector PotentialModel::confinement_gradient(const Vector& u) const {
  Vector g = Vector::Zero(u.size());
  if (confinement_.c0 != 0.0) {
    const double a = confinement_.exponent;
    g = confinement_.c0 * a * std::pow(1.0 + u.squaredNorm(), 0.5 * a - 1.0) * u;
  }
  if (confinement_.perturbation) g += confinement_.perturbation->gradient(u);
  return g;
}

Matrix PotentialModel::confinement_hessian(const Vector& u) const {
  const auto m = u.size();
  Matrix h = Matrix::Zero(m, m);
  if (confinement_.c0 != 0.0) {
    const double a = confinement_.exponent;
    const double q = 1.0 + u.squaredNorm();
    h.diagonal().setConstant(confinement_.c0 * a * std::pow(q, 0.5 * a - 1.0));
    h.noalias() += confinement_.c0 * a * (a - 2.0) * std::pow(q, 0.5 * a - 2.0) * u * u.transpose();
  }
  if (confinement_.perturbation) h += confinement_.perturbation->hessian(u);
  return h;
}

double PotentialModel::interaction_value(const Vector& x) const {
  check_dim(x);
  if (!interacting() && !interaction_.perturbation) return 0.0;
  if (n_ < 2) return 0.0;
  const double w = unordered_pair_weight();
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double r = (particle(x, i, d_) - particle(x, j, d_)).norm();
      if (singular() && !(r > 0.0)) return kInf;
      s += w * pair_jet(r).k;
    }
  }
  return std::isnan(s) ? kInf : s;
}

double PotentialModel::value(const Vector& x) const {
  check_dim(x);
  double s = offset_;
  for (std::size_t i = 0; i < n_; ++i) s += confinement_value(particle(x, i, d_));
  const double inter = interaction_value(x);
  if (inter == kInf) return kInf;
  s += inter;
  if (!std::isfinite(s)) return kInf;
  return s;
}

bool PotentialModel::in_domain(const Vector& x) const { return std::isfinite(value(x)); }

Vector PotentialModel::gradient(const Vector& x) const {
  check_dim(x);
  if (!in_domain(x)) throw DomainError("gradient requested outside the domain of U");
  Vector g(static_cast<Eigen::Index>(n_ * d_));
  for (std::size_t i = 0; i < n_; ++i)
    particle(g, i, d_) = confinement_gradient(particle(x, i, d_));
  if ((interacting() || interaction_.perturbation) && n_ > 1) {
    const double w = unordered_pair_weight();
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        const Vector u = particle(x, i, d_) - particle(x, j, d_);
        const double r = u.norm();
        if (!(r > 0.0)) continue;
        const Vector f = (w * pair_jet(r).k1 / r) * u;
        particle(g, i, d_) += f;
        particle(g, j, d_) -= f;
      }
    }
  }
  return g;
}

Matrix PotentialModel::hessian(const Vector& x) const {
  check_dim(x);
  if (!in_domain(x)) throw DomainError("Hessian requested outside the domain of U");
  const auto m = static_cast<Eigen::Index>(n_ * d_);
  const auto dd = static_cast<Eigen::Index>(d_);
  Matrix h = Matrix::Zero(m, m);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto o = static_cast<Eigen::Index>(i * d_);
    h.block(o, o, dd, dd) = confinement_hessian(particle(x, i, d_));
  }
  if ((interacting() || interaction_.perturbation) && n_ > 1) {
    const double w = unordered_pair_weight();
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        const Vector u = particle(x, i, d_) - particle(x, j, d_);
        const double r = u.norm();
        const RadialJet jet = pair_jet(r);
        Matrix b(dd, dd);
        if (r > 0.0) {
          const Vector nrm = u / r;
          const Matrix nn = nrm * nrm.transpose();
          b = jet.k2 * nn + (jet.k1 / r) * (Matrix::Identity(dd, dd) - nn);
        } else {
          b = jet.k2 * Matrix::Identity(dd, dd);
        }
        b *= w;
        const auto oi = static_cast<Eigen::Index>(i * d_);
        const auto oj = static_cast<Eigen::Index>(j * d_);
        h.block(oi, oi, dd, dd) += b;
        h.block(oj, oj, dd, dd) += b;
        h.block(oi, oj, dd, dd) -= b;
        h.block(oj, oi, dd, dd) -= b;
      }
    }
  }
  return h;
}

double min_pair_distance(const Vector& x, std::size_t d) {
  if (d == 0 || x.size() % static_cast<Eigen::Index>(d) != 0)
    throw ParameterError("configuration length is not a multiple of the dimension");
  const std::size_t n = static_cast<std::size_t>(x.size()) / d;
  double best = kInf;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      best = std::min(best, (particle(x, i, d) - particle(x, j, d)).norm());
  return best;
}

}  // namespace levy
