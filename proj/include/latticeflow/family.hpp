#pragma once

#include <functional>
#include <string>
#include <vector>

#include "latticeflow/real_function.hpp"

namespace latticeflow {

// An indexed family of functions: a sequence (x_n), n = 1..n_max, or a
// continuum (x_t), t in [0, t_hi] sampled on an explicit lattice. "Eventual"
// quantifiers are checked on the sampled range only; reports state the range.
struct FunctionFamily {
  enum class Kind { sequence, continuum };
  Kind kind = Kind::sequence;
  std::string label;

  int n_max = 0;
  std::function<RealFunction(int)> seq_member;  // 1-based index

  std::vector<double> times;  // ascending; continuum sample lattice
  std::function<RealFunction(double)> cont_member;

  static FunctionFamily sequence(int n_max, std::function<RealFunction(int)> member,
                                 std::string label = "sequence");

  // Lattice: {0} followed by n_samples-1 log-spaced points in
  // [t_hi*floor_ratio, t_hi] (log spacing concentrates samples toward 0,
  // where continuity claims are hardest). If t_lo > 0, the lattice is
  // n_samples log-spaced points in [t_lo, t_hi] instead.
  static FunctionFamily continuum(double t_lo, double t_hi, int n_samples,
                                  std::function<RealFunction(double)> member,
                                  std::string label = "continuum", double floor_ratio = 1e-6);

  int member_count() const;
  // Members in storage order: sequence ascending n, continuum ascending t.
  RealFunction member_at(int idx) const;
  double index_value(int idx) const;
  std::string index_kind() const { return kind == Kind::sequence ? "n" : "t"; }
};

// Log-spaced lattice helper (both endpoints included).
std::vector<double> log_lattice(double lo, double hi, int count);

}  // namespace latticeflow
