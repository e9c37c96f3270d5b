#include "hystrl/distributed_parameter.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "hystrl/error.hpp"

namespace hystrl {

DistributedParameter::DistributedParameter(TriDomain domain, std::vector<ChannelField> channels)
    : domain_(domain), channels_(std::move(channels)) {
  for (const auto& ch : channels_) {
    if (ch.level < 0 || ch.values.size() != cell_count(ch.level)) {
      throw Error(Errc::dimension_mismatch, "channel values do not match 4^level cells");
    }
  }
}

DistributedParameter DistributedParameter::zeros(const TriDomain& domain, int level, int channels) {
  return constant(domain, level, 0.0, channels);
}

DistributedParameter DistributedParameter::constant(const TriDomain& domain, int level, double value,
                                                    int channels) {
  std::vector<ChannelField> fields(static_cast<std::size_t>(channels));
  for (auto& f : fields) {
    f.level = level;
    f.values = Eigen::VectorXd::Constant(cell_count(level), value);
  }
  return DistributedParameter(domain, std::move(fields));
}

int DistributedParameter::level() const {
  if (channels_.empty()) throw Error(Errc::level_mismatch, "parameter has no channels");
  const int j = channels_.front().level;
  for (const auto& ch : channels_) {
    if (ch.level != j) throw Error(Errc::level_mismatch, "channels live on different levels");
  }
  return j;
}

Eigen::Index DistributedParameter::size() const noexcept {
  Eigen::Index n = 0;
  for (const auto& ch : channels_) n += ch.values.size();
  return n;
}

Eigen::VectorXd DistributedParameter::flat() const {
  Eigen::VectorXd out(size());
  Eigen::Index offset = 0;
  for (const auto& ch : channels_) {
    out.segment(offset, ch.values.size()) = ch.values;
    offset += ch.values.size();
  }
  return out;
}

DistributedParameter DistributedParameter::with_flat(const Eigen::Ref<const Eigen::VectorXd>& flat) const {
  if (flat.size() != size()) throw Error(Errc::dimension_mismatch, "flat vector has wrong length");
  DistributedParameter out = *this;
  Eigen::Index offset = 0;
  for (auto& ch : out.channels_) {
    ch.values = flat.segment(offset, ch.values.size());
    offset += ch.values.size();
  }
  return out;
}

Eigen::VectorXd DistributedParameter::coefficients(int i) const {
  return channel(i).values * std::sqrt(cell_area(i));
}

void DistributedParameter::check_compatible(const DistributedParameter& other) const {
  if (!(domain_ == other.domain_) || channels_.size() != other.channels_.size()) {
    throw Error(Errc::dimension_mismatch, "parameters live on different domains or channel counts");
  }
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i].level != other.channels_[i].level) {
      throw Error(Errc::level_mismatch, "channel levels differ");
    }
  }
}

DistributedParameter& DistributedParameter::operator+=(const DistributedParameter& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < channels_.size(); ++i) channels_[i].values += other.channels_[i].values;
  return *this;
}

DistributedParameter& DistributedParameter::operator-=(const DistributedParameter& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < channels_.size(); ++i) channels_[i].values -= other.channels_[i].values;
  return *this;
}

DistributedParameter& DistributedParameter::operator*=(double a) {
  for (auto& ch : channels_) ch.values *= a;
  return *this;
}

double inner_product(const DistributedParameter& a, const DistributedParameter& b) {
  if (a.channels() != b.channels()) throw Error(Errc::dimension_mismatch, "channel counts differ");
  double sum = 0.0;
  for (int i = 0; i < a.channels(); ++i) {
    const int level = std::max(a.channel(i).level, b.channel(i).level);
    const ChannelField fa = prolong_channel(a.channel(i), level);
    const ChannelField fb = prolong_channel(b.channel(i), level);
    sum += fa.values.dot(fb.values) * a.domain().cell_area(level);
  }
  return sum;
}

double p_norm(const DistributedParameter& mu) {
  double sum = 0.0;
  for (int i = 0; i < mu.channels(); ++i) sum += mu.channel(i).values.squaredNorm() * mu.cell_area(i);
  return std::sqrt(sum);
}

ChannelField project_analytic_channel(const PointFunction& mu_fn, const TriDomain& domain, int level,
                                      int oversample_level) {
  if (level < 0) throw Error(Errc::invalid_argument, "level must be nonnegative");
  if (oversample_level < level) {
    throw Error(Errc::level_mismatch, "oversampling level must not be below the target level");
  }
  const int depth = oversample_level - level;
  const double weight = 1.0 / static_cast<double>(cell_count(depth));
  const MeshLevel mesh = refine(domain, level, std::max(level, kDefaultMaxLevel));
  ChannelField field{level, Eigen::VectorXd(static_cast<Eigen::Index>(mesh.size()))};
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    double sum = 0.0;
    for_each_centroid(mesh.cell(k), depth, [&](std::int64_t, Point2 p) { sum += mu_fn(p.s1, p.s2); });
    field.values[static_cast<Eigen::Index>(k)] = sum * weight;
  }
  return field;
}

DistributedParameter project_analytic(const PointFunction& mu_fn, const TriDomain& domain, int level,
                                      int oversample_level) {
  return project_analytic(std::vector<PointFunction>{mu_fn}, domain, level, oversample_level);
}

DistributedParameter project_analytic(const std::vector<PointFunction>& mu_fns, const TriDomain& domain,
                                      int level, int oversample_level) {
  std::vector<ChannelField> fields;
  fields.reserve(mu_fns.size());
  for (const auto& fn : mu_fns) fields.push_back(project_analytic_channel(fn, domain, level, oversample_level));
  return DistributedParameter(domain, std::move(fields));
}

ChannelField restrict_channel(const ChannelField& field, int level) {
  if (level > field.level) throw Error(Errc::level_mismatch, "cannot restrict to a finer level");
  if (level < 0) throw Error(Errc::invalid_argument, "level must be nonnegative");
  const Eigen::Index block = cell_count(field.level - level);
  ChannelField out{level, Eigen::VectorXd(cell_count(level))};
  for (Eigen::Index k = 0; k < out.values.size(); ++k) {
    out.values[k] = field.values.segment(k * block, block).mean();
  }
  return out;
}

DistributedParameter restrict(const DistributedParameter& mu, int level) {
  std::vector<ChannelField> fields;
  for (int i = 0; i < mu.channels(); ++i) fields.push_back(restrict_channel(mu.channel(i), level));
  return DistributedParameter(mu.domain(), std::move(fields));
}

ChannelField prolong_channel(const ChannelField& field, int level) {
  if (level < field.level) throw Error(Errc::level_mismatch, "cannot prolong to a coarser level");
  const Eigen::Index block = cell_count(level - field.level);
  ChannelField out{level, Eigen::VectorXd(cell_count(level))};
  for (Eigen::Index k = 0; k < field.values.size(); ++k) {
    out.values.segment(k * block, block).setConstant(field.values[k]);
  }
  return out;
}

DistributedParameter prolong(const DistributedParameter& mu, int level) {
  std::vector<ChannelField> fields;
  for (int i = 0; i < mu.channels(); ++i) fields.push_back(prolong_channel(mu.channel(i), level));
  return DistributedParameter(mu.domain(), std::move(fields));
}

std::vector<double> approx_seminorm_terms(const PointFunction& mu_fn, const TriDomain& domain,
                                          double alpha, int max_level, int oversample_level) {
  if (max_level < 1) throw Error(Errc::invalid_argument, "seminorm needs at least level 1");
  const ChannelField finest = project_analytic_channel(mu_fn, domain, max_level, oversample_level);
  std::vector<double> terms(static_cast<std::size_t>(max_level + 1));
  ChannelField coarse = restrict_channel(finest, 0);
  terms[0] = coarse.values.squaredNorm() * domain.cell_area(0);
  for (int j = 1; j <= max_level; ++j) {
    const ChannelField fine = restrict_channel(finest, j);
    const ChannelField detail{j, fine.values - prolong_channel(coarse, j).values};
    terms[static_cast<std::size_t>(j)] =
        std::exp2(2.0 * alpha * j) * detail.values.squaredNorm() * domain.cell_area(j);
    coarse = fine;
  }
  return terms;
}

double approx_seminorm(const PointFunction& mu_fn, const TriDomain& domain, double alpha, int max_level,
                       int oversample_level) {
  double sum = 0.0;
  for (double t : approx_seminorm_terms(mu_fn, domain, alpha, max_level, oversample_level)) sum += t;
  return std::sqrt(sum);
}

void write_csv(std::ostream& out, const DistributedParameter& mu) {
  out << "level,cell_index,channel,value\n";
  out << std::setprecision(17);
  for (int i = 0; i < mu.channels(); ++i) {
    const auto& ch = mu.channel(i);
    for (Eigen::Index k = 0; k < ch.values.size(); ++k) {
      out << ch.level << ',' << (k + 1) << ',' << (i + 1) << ',' << ch.values[k] << '\n';
    }
  }
}

DistributedParameter read_csv(std::istream& in, const TriDomain& domain) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::invalid_argument, "empty parameter CSV");
  std::map<int, std::pair<int, std::map<long long, double>>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    int level = 0;
    long long index = 0;
    int channel = 0;
    double value = 0.0;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(row >> level >> c1 >> index >> c2 >> channel >> c3 >> value) || c1 != ',' || c2 != ',' ||
        c3 != ',') {
      throw Error(Errc::invalid_argument, "malformed parameter CSV row: " + line);
    }
    auto& entry = rows[channel];
    if (!entry.second.empty() && entry.first != level) {
      throw Error(Errc::level_mismatch, "channel rows disagree on level");
    }
    entry.first = level;
    entry.second[index] = value;
  }
  std::vector<ChannelField> fields;
  int expected_channel = 1;
  for (const auto& [channel, entry] : rows) {
    if (channel != expected_channel++) throw Error(Errc::invalid_argument, "channels must be 1..l");
    ChannelField f{entry.first, Eigen::VectorXd(cell_count(entry.first))};
    if (static_cast<Eigen::Index>(entry.second.size()) != f.values.size()) {
      throw Error(Errc::dimension_mismatch, "channel is missing cells");
    }
    for (const auto& [index, value] : entry.second) {
      if (index < 1 || index > f.values.size()) throw Error(Errc::invalid_argument, "cell index out of range");
      f.values[static_cast<Eigen::Index>(index - 1)] = value;
    }
    fields.push_back(std::move(f));
  }
  return DistributedParameter(domain, std::move(fields));
}

}  // namespace hystrl
