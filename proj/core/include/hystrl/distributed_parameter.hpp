#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <vector>

#include "hystrl/tri_mesh.hpp"

namespace hystrl {

/// Cell values of one kernel channel on one mesh level.
struct ChannelField {
  int level = 0;
  Eigen::VectorXd values;
};

/// Distributed parameter mu = (mu_1, ..., mu_l), each mu_i piecewise constant
/// on its own refinement level. Values (not orthonormal coefficients) are the
/// stored representation; coefficient c_k = v_k * sqrt(m(cell)).
class DistributedParameter {
 public:
  DistributedParameter() = default;
  DistributedParameter(TriDomain domain, std::vector<ChannelField> channels);

  static DistributedParameter zeros(const TriDomain& domain, int level, int channels = 1);
  static DistributedParameter constant(const TriDomain& domain, int level, double value,
                                       int channels = 1);

  [[nodiscard]] const TriDomain& domain() const noexcept { return domain_; }
  [[nodiscard]] int channels() const noexcept { return static_cast<int>(channels_.size()); }
  [[nodiscard]] const ChannelField& channel(int i) const { return channels_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] ChannelField& channel(int i) { return channels_.at(static_cast<std::size_t>(i)); }
  /// Common level of all channels; Errc::level_mismatch if they differ.
  [[nodiscard]] int level() const;
  [[nodiscard]] double cell_area(int i) const { return domain_.cell_area(channel(i).level); }

  /// Total number of cell values across channels.
  [[nodiscard]] Eigen::Index size() const noexcept;
  /// Channel values concatenated in channel order.
  [[nodiscard]] Eigen::VectorXd flat() const;
  /// Same layout as *this, values taken from a flat vector.
  [[nodiscard]] DistributedParameter with_flat(const Eigen::Ref<const Eigen::VectorXd>& flat) const;

  [[nodiscard]] Eigen::VectorXd coefficients(int i) const;

  DistributedParameter& operator+=(const DistributedParameter& other);
  DistributedParameter& operator-=(const DistributedParameter& other);
  DistributedParameter& operator*=(double a);
  friend DistributedParameter operator+(DistributedParameter a, const DistributedParameter& b) { return a += b; }
  friend DistributedParameter operator-(DistributedParameter a, const DistributedParameter& b) { return a -= b; }
  friend DistributedParameter operator*(double a, DistributedParameter b) { return b *= a; }

 private:
  void check_compatible(const DistributedParameter& other) const;

  TriDomain domain_;
  std::vector<ChannelField> channels_;
};

using PointFunction = std::function<double(double s1, double s2)>;

/// L^2(Delta) inner product summed over channels (product-space pairing).
[[nodiscard]] double inner_product(const DistributedParameter& a, const DistributedParameter& b);
[[nodiscard]] double p_norm(const DistributedParameter& mu);

/// Pi_j mu for an analytic mu: average of mu at the level-`oversample_level`
/// centroids inside each level-j cell.
[[nodiscard]] ChannelField project_analytic_channel(const PointFunction& mu_fn, const TriDomain& domain,
                                                    int level, int oversample_level);
[[nodiscard]] DistributedParameter project_analytic(const PointFunction& mu_fn, const TriDomain& domain,
                                                    int level, int oversample_level);
[[nodiscard]] DistributedParameter project_analytic(const std::vector<PointFunction>& mu_fns,
                                                    const TriDomain& domain, int level,
                                                    int oversample_level);

/// Phi_{J->j}: every level-j value is the mean of its 4^(J-j) descendants.
[[nodiscard]] ChannelField restrict_channel(const ChannelField& field, int level);
[[nodiscard]] DistributedParameter restrict(const DistributedParameter& mu, int level);

/// Inverse embedding V_j -> V_J (piecewise-constant injection).
[[nodiscard]] ChannelField prolong_channel(const ChannelField& field, int level);
[[nodiscard]] DistributedParameter prolong(const DistributedParameter& mu, int level);

/// Square root of sum_{j=0..J} 2^(2 alpha j) ||(Pi_j - Pi_{j-1}) mu||^2 with
/// Pi_{-1} = 0; Pi_J mu is computed at `oversample_level` (>= max_level).
[[nodiscard]] double approx_seminorm(const PointFunction& mu_fn, const TriDomain& domain, double alpha,
                                     int max_level, int oversample_level);
/// Per-level terms 2^(2 alpha j) ||(Pi_j - Pi_{j-1}) mu||^2, j = 0..J.
[[nodiscard]] std::vector<double> approx_seminorm_terms(const PointFunction& mu_fn,
                                                        const TriDomain& domain, double alpha,
                                                        int max_level, int oversample_level);

/// CSV rows "level,cell_index,channel,value" with 1-based cell and channel.
void write_csv(std::ostream& out, const DistributedParameter& mu);
[[nodiscard]] DistributedParameter read_csv(std::istream& in, const TriDomain& domain);

}  // namespace hystrl
