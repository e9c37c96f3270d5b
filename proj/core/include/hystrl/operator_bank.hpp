#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "hystrl/distributed_parameter.hpp"
#include "hystrl/play_kernel.hpp"
#include "hystrl/ridge.hpp"
#include "hystrl/tri_mesh.hpp"

namespace hystrl {

/// a : R^m -> R, the scalar signal every kernel of the bank reads.
class Scalarizer {
 public:
  enum class Kind { coordinate, linear, named };

  Scalarizer() = default;
  static Scalarizer coordinate(int index);
  static Scalarizer linear(Eigen::VectorXd weights);
  static Scalarizer named(std::string name, std::function<double(const Eigen::VectorXd&)> fn);

  [[nodiscard]] double operator()(const Eigen::VectorXd& x) const;
  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

 private:
  Kind kind_ = Kind::coordinate;
  int index_ = 0;
  Eigen::VectorXd weights_;
  std::string name_ = "x0";
  std::function<double(const Eigen::VectorXd&)> fn_;
};

/// b : R^m -> R^{q x l}.
class Mixer {
 public:
  enum class Kind { constant, state_dependent };

  Mixer() : Mixer(Eigen::MatrixXd::Identity(1, 1)) {}
  explicit Mixer(Eigen::MatrixXd b);
  Mixer(int rows, int cols, std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> fn);

  [[nodiscard]] Eigen::MatrixXd operator()(const Eigen::VectorXd& x) const;
  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] int rows() const noexcept { return rows_; }
  [[nodiscard]] int cols() const noexcept { return cols_; }

 private:
  Kind kind_ = Kind::constant;
  int rows_ = 1;
  int cols_ = 1;
  Eigen::MatrixXd constant_;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> fn_;
};

struct ChannelSpec {
  RidgeFunction gamma;
  int level = 0;
};

/// Kernel memory of a bank, enough to undo a provisional advance.
struct BankSnapshot {
  double time = 0.0;
  double last_input = 0.0;
  Eigen::VectorXd last_state;
  std::vector<Eigen::VectorXd> kappa;
  std::size_t history_size = 0;
};

/// l channels of play kernels sitting at the quadrature points of their mesh
/// levels, all driven by the common scalar input a(X(t)).
class OperatorBank {
 public:
  OperatorBank() = default;
  OperatorBank(TriDomain domain, std::vector<ChannelSpec> channels, Scalarizer a, Mixer b,
               double kappa_seed = 0.0);

  /// Initialise every kernel at a(X0).
  void start(double t0, const Eigen::VectorXd& x0);
  /// One linear piece of a(X) from the last sample to a(x_new).
  /// Errc::non_monotone_time when t_new is earlier than the last sample, or
  /// equal to it with a different input value.
  void advance(double t_new, const Eigen::VectorXd& x_new);

  [[nodiscard]] BankSnapshot snapshot() const;
  void restore(const BankSnapshot& snap);

  [[nodiscard]] bool started() const noexcept { return started_; }
  [[nodiscard]] double time() const noexcept { return time_; }
  [[nodiscard]] double last_input() const noexcept { return last_input_; }
  [[nodiscard]] const Eigen::VectorXd& last_state() const noexcept { return last_state_; }
  [[nodiscard]] const PiecewiseLinearInput& history() const noexcept { return history_; }

  [[nodiscard]] const TriDomain& domain() const noexcept { return domain_; }
  [[nodiscard]] int channels() const noexcept { return static_cast<int>(specs_.size()); }
  [[nodiscard]] const ChannelSpec& spec(int i) const { return specs_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] const MeshLevel& mesh(int i) const { return meshes_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] const Eigen::VectorXd& kappa(int i) const { return kappa_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] const Scalarizer& scalarizer() const noexcept { return a_; }
  [[nodiscard]] const Mixer& mixer() const noexcept { return b_; }
  [[nodiscard]] double kappa_seed() const noexcept { return kappa_seed_; }
  /// Total number of cells, sum_i 4^{j_i}.
  [[nodiscard]] Eigen::Index width() const noexcept;

  /// Zero parameter with this bank's channel levels.
  [[nodiscard]] DistributedParameter zero_parameter() const;

 private:
  void require_started() const;

  TriDomain domain_;
  std::vector<ChannelSpec> specs_;
  std::vector<MeshLevel> meshes_;
  std::vector<Eigen::VectorXd> s1_;
  std::vector<Eigen::VectorXd> s2_;
  std::vector<Eigen::VectorXd> kappa_;
  Scalarizer a_;
  Mixer b_;
  double kappa_seed_ = 0.0;
  bool started_ = false;
  double time_ = 0.0;
  double last_input_ = 0.0;
  Eigen::VectorXd last_state_;
  PiecewiseLinearInput history_;
};

/// Channel outputs (h_{i,j} a(X))(t) o mu_i = sum_k kappa_{i,k} v_{i,k} m_{i,k}.
/// Errc::level_mismatch when mu does not live on the bank's levels.
[[nodiscard]] Eigen::VectorXd apply_hj(const OperatorBank& bank, const DistributedParameter& mu);
/// y = b(X(t)) apply_hj(bank, mu).
[[nodiscard]] Eigen::VectorXd apply_H(const OperatorBank& bank, const DistributedParameter& mu);

/// W(t) in R^{q x sum 4^{j_i}}, W[r, off_i + k] = b_{r,i} kappa_{i,k} m_{i,k}.
[[nodiscard]] Eigen::MatrixXd operator_matrix(const OperatorBank& bank);

/// Riesz representative of z^T W: cell values (W^T z)_{i,k} / m_{i,k}, laid
/// out like `layout`.
[[nodiscard]] DistributedParameter adjoint_apply(const Eigen::MatrixXd& w, const Eigen::VectorXd& z,
                                                 const DistributedParameter& layout);
/// Same as adjoint_apply(operator_matrix(bank), z, ...) without forming W.
[[nodiscard]] DistributedParameter adjoint_apply(const OperatorBank& bank, const Eigen::VectorXd& z);

}  // namespace hystrl

namespace hystrl {

/// Runs fn() with the bank provisionally advanced to (t, x), then puts the
/// committed kernel memory back.
template <class Fn>
decltype(auto) with_provisional(OperatorBank& bank, double t, const Eigen::VectorXd& x, Fn&& fn) {
  const BankSnapshot snap = bank.snapshot();
  struct Restore {
    OperatorBank& bank;
    const BankSnapshot& snap;
    ~Restore() { bank.restore(snap); }
  } guard{bank, snap};
  bank.advance(t, x);
  return fn();
}

}  // namespace hystrl
