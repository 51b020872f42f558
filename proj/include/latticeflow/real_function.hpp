#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "latticeflow/grid.hpp"
#include "latticeflow/piecewise_affine.hpp"

namespace latticeflow {

using ordered_json = nlohmann::ordered_json;

struct SupportInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// Declared membership in the positive cone / the compactly supported space.
// Claims are validated against grids by the checks that rely on them.
struct ConeFlag {
  bool positive = false;
  std::optional<SupportInterval> compact_support;
};

// A real function of one real variable: closed-form evaluator, samples on a
// grid (linear interpolation, constant extension), or piecewise affine.
// Immutable value type; cheap to copy.
class RealFunction {
 public:
  RealFunction();  // the zero function

  static RealFunction closed_form(std::string label, std::function<double(double)> eval,
                                  ConeFlag flag = {}, std::string registry_name = "");
  static RealFunction sampled(const GridSpec& grid, std::vector<double> values,
                              std::string label = "sampled", ConeFlag flag = {});
  static RealFunction piecewise(PiecewiseAffineFunction pa, std::string label = "pa",
                                ConeFlag flag = {});

  double operator()(double x) const;

  // Values at every grid point; throws eval_error on a non-finite value.
  std::vector<double> eval_on(const GridSpec& grid) const;

  const std::string& label() const;
  const ConeFlag& flag() const;

  bool is_piecewise_affine() const;
  const PiecewiseAffineFunction* piecewise_affine() const;  // nullptr unless PA-backed
  bool is_sampled() const;

  RealFunction with_flag(ConeFlag flag) const;
  RealFunction with_label(std::string label) const;

  // Serialization. Closed-form functions round-trip only when they came from
  // the registry; anonymous evaluators throw.
  ordered_json to_json() const;
  static RealFunction from_json(const ordered_json& j);

  // Fixed registry of named closed forms and piecewise-affine shapes, e.g.
  // "one", "const(2)", "identity", "abs", "square", "sin", "one_plus_abs",
  // "clip_one_plus_abs(51)", "hat(0,1,1)", "plateau(5)", "gauss(1)",
  // "lp_singular(1)", "clip_lp_singular(1,50)".
  static RealFunction from_registry(const std::string& spec);

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  explicit RealFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
};

// Shorthand constructors used throughout tests and the CLI.
RealFunction rf_zero();
RealFunction rf_one();
RealFunction rf_const(double c);
RealFunction rf_identity();
RealFunction rf_abs();
RealFunction rf_one_plus_abs();
RealFunction rf_clip_one_plus_abs(double cap);
RealFunction rf_hat(double center, double halfwidth, double height);
RealFunction rf_plateau(double halfwidth);
RealFunction rf_gauss(double sigma);
RealFunction rf_lp_singular(double p);

}  // namespace latticeflow
