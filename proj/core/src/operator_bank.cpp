#include "hystrl/operator_bank.hpp"

#include <algorithm>
#include <cmath>

#include "hystrl/error.hpp"

namespace hystrl {

Scalarizer Scalarizer::coordinate(int index) {
  if (index < 0) throw Error(Errc::invalid_argument, "coordinate index must be nonnegative");
  Scalarizer a;
  a.kind_ = Kind::coordinate;
  a.index_ = index;
  a.name_ = "x" + std::to_string(index);
  return a;
}

Scalarizer Scalarizer::linear(Eigen::VectorXd weights) {
  Scalarizer a;
  a.kind_ = Kind::linear;
  a.weights_ = std::move(weights);
  a.name_ = "linear";
  return a;
}

Scalarizer Scalarizer::named(std::string name, std::function<double(const Eigen::VectorXd&)> fn) {
  if (!fn) throw Error(Errc::invalid_argument, "named scalarizer needs a callable");
  Scalarizer a;
  a.kind_ = Kind::named;
  a.name_ = std::move(name);
  a.fn_ = std::move(fn);
  return a;
}

double Scalarizer::operator()(const Eigen::VectorXd& x) const {
  switch (kind_) {
    case Kind::coordinate:
      if (index_ >= x.size()) throw Error(Errc::dimension_mismatch, "scalarizer coordinate out of range");
      return x[index_];
    case Kind::linear:
      if (weights_.size() != x.size()) throw Error(Errc::dimension_mismatch, "scalarizer weights vs state");
      return weights_.dot(x);
    case Kind::named:
      return fn_(x);
  }
  return 0.0;
}

Mixer::Mixer(Eigen::MatrixXd b)
    : kind_(Kind::constant), rows_(static_cast<int>(b.rows())), cols_(static_cast<int>(b.cols())),
      constant_(std::move(b)) {}

Mixer::Mixer(int rows, int cols, std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> fn)
    : kind_(Kind::state_dependent), rows_(rows), cols_(cols), fn_(std::move(fn)) {
  if (!fn_) throw Error(Errc::invalid_argument, "state-dependent mixer needs a callable");
}

Eigen::MatrixXd Mixer::operator()(const Eigen::VectorXd& x) const {
  if (kind_ == Kind::constant) return constant_;
  Eigen::MatrixXd b = fn_(x);
  if (b.rows() != rows_ || b.cols() != cols_) throw Error(Errc::dimension_mismatch, "mixer returned wrong shape");
  return b;
}

OperatorBank::OperatorBank(TriDomain domain, std::vector<ChannelSpec> specs, Scalarizer a, Mixer b,
                           double kappa_seed)
    : domain_(domain), specs_(std::move(specs)), a_(std::move(a)), b_(std::move(b)),
      kappa_seed_(kappa_seed) {
  if (specs_.empty()) throw Error(Errc::invalid_argument, "bank needs at least one channel");
  if (b_.cols() != channels()) throw Error(Errc::dimension_mismatch, "mixer columns must equal channel count");
  for (const auto& spec : specs_) {
    MeshLevel mesh = refine(domain_, spec.level, std::max(spec.level, kDefaultMaxLevel));
    Eigen::VectorXd s1(static_cast<Eigen::Index>(mesh.size()));
    Eigen::VectorXd s2(s1.size());
    for (std::size_t k = 0; k < mesh.size(); ++k) {
      s1[static_cast<Eigen::Index>(k)] = mesh.threshold(k).s1;
      s2[static_cast<Eigen::Index>(k)] = mesh.threshold(k).s2;
    }
    s1_.push_back(std::move(s1));
    s2_.push_back(std::move(s2));
    kappa_.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.size())));
    meshes_.push_back(std::move(mesh));
  }
}

Eigen::Index OperatorBank::width() const noexcept {
  Eigen::Index n = 0;
  for (const auto& k : kappa_) n += k.size();
  return n;
}

DistributedParameter OperatorBank::zero_parameter() const {
  std::vector<ChannelField> fields;
  for (const auto& spec : specs_) fields.push_back({spec.level, Eigen::VectorXd::Zero(cell_count(spec.level))});
  return DistributedParameter(domain_, std::move(fields));
}

void OperatorBank::require_started() const {
  if (!started_) throw Error(Errc::invalid_argument, "operator bank used before start()");
}

void OperatorBank::start(double t0, const Eigen::VectorXd& x0) {
  const double f0 = a_(x0);
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const auto& gamma = specs_[i].gamma;
    auto& kappa = kappa_[i];
    for (Eigen::Index k = 0; k < kappa.size(); ++k) {
      kappa[k] = kernel_init(gamma, {s1_[i][k], s2_[i][k]}, f0, kappa_seed_).kappa;
    }
  }
  started_ = true;
  time_ = t0;
  last_input_ = f0;
  last_state_ = x0;
  history_ = PiecewiseLinearInput({t0}, {f0});
}

void OperatorBank::advance(double t_new, const Eigen::VectorXd& x_new) {
  require_started();
  const double f_new = a_(x_new);
  if (std::isnan(f_new)) throw Error(Errc::nan_detected, "scalarized input is NaN");
  if (t_new < time_ || (t_new == time_ && f_new != last_input_)) {
    throw Error(Errc::non_monotone_time, "bank advanced backwards in time");
  }
  last_state_ = x_new;
  if (t_new == time_) return;
  if (f_new != last_input_) {
    for (std::size_t i = 0; i < specs_.size(); ++i) {
      const auto& gamma = specs_[i].gamma;
      auto& kappa = kappa_[i];
      for (Eigen::Index k = 0; k < kappa.size(); ++k) {
        kappa[k] = kernel_step({kappa[k], last_input_}, gamma, {s1_[i][k], s2_[i][k]}, f_new).kappa;
      }
    }
  }
  time_ = t_new;
  last_input_ = f_new;
  history_.append(t_new, f_new);
}

BankSnapshot OperatorBank::snapshot() const {
  return {time_, last_input_, last_state_, kappa_, history_.size()};
}

void OperatorBank::restore(const BankSnapshot& snap) {
  if (snap.kappa.size() != kappa_.size()) throw Error(Errc::dimension_mismatch, "snapshot from another bank");
  time_ = snap.time;
  last_input_ = snap.last_input;
  last_state_ = snap.last_state;
  kappa_ = snap.kappa;
  history_.truncate(snap.history_size);
}

namespace {

void check_levels(const OperatorBank& bank, const DistributedParameter& mu) {
  if (mu.channels() != bank.channels()) throw Error(Errc::dimension_mismatch, "parameter channel count");
  for (int i = 0; i < bank.channels(); ++i) {
    if (mu.channel(i).level != bank.spec(i).level) {
      throw Error(Errc::level_mismatch, "parameter level differs from bank level; restrict first");
    }
  }
}

}  // namespace

Eigen::VectorXd apply_hj(const OperatorBank& bank, const DistributedParameter& mu) {
  check_levels(bank, mu);
  Eigen::VectorXd out(bank.channels());
  for (int i = 0; i < bank.channels(); ++i) {
    out[i] = bank.kappa(i).dot(mu.channel(i).values) * bank.mesh(i).cell_area();
  }
  return out;
}

Eigen::VectorXd apply_H(const OperatorBank& bank, const DistributedParameter& mu) {
  return bank.mixer()(bank.last_state()) * apply_hj(bank, mu);
}

Eigen::MatrixXd operator_matrix(const OperatorBank& bank) {
  const Eigen::MatrixXd b = bank.mixer()(bank.last_state());
  Eigen::MatrixXd w(b.rows(), bank.width());
  Eigen::Index offset = 0;
  for (int i = 0; i < bank.channels(); ++i) {
    const Eigen::VectorXd weighted = bank.kappa(i) * bank.mesh(i).cell_area();
    w.middleCols(offset, weighted.size()) = b.col(i) * weighted.transpose();
    offset += weighted.size();
  }
  return w;
}

DistributedParameter adjoint_apply(const Eigen::MatrixXd& w, const Eigen::VectorXd& z,
                                   const DistributedParameter& layout) {
  if (w.rows() != z.size() || w.cols() != layout.size()) {
    throw Error(Errc::dimension_mismatch, "adjoint operand shapes disagree");
  }
  const Eigen::VectorXd wt_z = w.transpose() * z;
  DistributedParameter out = layout.with_flat(wt_z);
  for (int i = 0; i < out.channels(); ++i) out.channel(i).values /= out.cell_area(i);
  return out;
}

DistributedParameter adjoint_apply(const OperatorBank& bank, const Eigen::VectorXd& z) {
  const Eigen::MatrixXd b = bank.mixer()(bank.last_state());
  if (b.rows() != z.size()) throw Error(Errc::dimension_mismatch, "adjoint operand shapes disagree");
  const Eigen::VectorXd bz = b.transpose() * z;
  DistributedParameter out = bank.zero_parameter();
  for (int i = 0; i < bank.channels(); ++i) out.channel(i).values = bz[i] * bank.kappa(i);
  return out;
}

}  // namespace hystrl
