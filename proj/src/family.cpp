#include "latticeflow/family.hpp"

#include <cmath>

#include "latticeflow/errors.hpp"

namespace latticeflow {

std::vector<double> log_lattice(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw precondition_error("log_lattice: need 0 < lo < hi and count >= 2");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] =
        std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

FunctionFamily FunctionFamily::sequence(int n_max, std::function<RealFunction(int)> member,
                                        std::string label) {
  if (n_max < 1) throw precondition_error("FunctionFamily: n_max must be >= 1");
  FunctionFamily fam;
  fam.kind = Kind::sequence;
  fam.n_max = n_max;
  fam.seq_member = std::move(member);
  fam.label = std::move(label);
  return fam;
}

FunctionFamily FunctionFamily::continuum(double t_lo, double t_hi, int n_samples,
                                         std::function<RealFunction(double)> member,
                                         std::string label, double floor_ratio) {
  if (!(t_hi > 0.0) || t_lo < 0.0 || t_lo >= t_hi)
    throw precondition_error("FunctionFamily: need 0 <= t_lo < t_hi");
  if (n_samples < 2) throw precondition_error("FunctionFamily: need n_samples >= 2");
  FunctionFamily fam;
  fam.kind = Kind::continuum;
  fam.cont_member = std::move(member);
  fam.label = std::move(label);
  if (t_lo > 0.0) {
    fam.times = log_lattice(t_lo, t_hi, n_samples);
  } else {
    fam.times = log_lattice(t_hi * floor_ratio, t_hi, n_samples - 1);
    fam.times.insert(fam.times.begin(), 0.0);
  }
  return fam;
}

int FunctionFamily::member_count() const {
  return kind == Kind::sequence ? n_max : static_cast<int>(times.size());
}

RealFunction FunctionFamily::member_at(int idx) const {
  if (kind == Kind::sequence) return seq_member(idx + 1);
  return cont_member(times[static_cast<std::size_t>(idx)]);
}

double FunctionFamily::index_value(int idx) const {
  if (kind == Kind::sequence) return static_cast<double>(idx + 1);
  return times[static_cast<std::size_t>(idx)];
}

}  // namespace latticeflow
