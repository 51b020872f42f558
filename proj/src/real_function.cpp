#include "latticeflow/real_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "latticeflow/errors.hpp"
#include "latticeflow/parallel.hpp"

namespace latticeflow {

struct RealFunction::Impl {
  // Exactly one representation is active.
  std::function<double(double)> eval;                          // closed form
  std::optional<PiecewiseAffineFunction> pa;                   // piecewise affine
  std::optional<std::pair<GridSpec, std::vector<double>>> samples;

  std::string label;
  std::string registry_name;  // nonempty iff the closed form is serializable
  ConeFlag flag;

  double value(double x) const {
    if (pa) return (*pa)(x);
    if (samples) {
      const GridSpec& g = samples->first;
      const std::vector<double>& v = samples->second;
      if (x <= g.x_lo) return v.front();
      if (x >= g.x_hi) return v.back();
      const double t = (x - g.x_lo) / g.spacing();
      // Snap to the node when the index is an integer up to rounding, so
      // evaluation at the grid's own points returns the stored value exactly.
      const double r = std::round(t);
      if (std::fabs(t - r) < 1e-9 && r >= 0.0 && r <= static_cast<double>(g.n - 1))
        return v[static_cast<std::size_t>(r)];
      const int i = std::min(static_cast<int>(t), g.n - 2);
      const double frac = t - static_cast<double>(i);
      return v[static_cast<std::size_t>(i)] * (1.0 - frac) + v[static_cast<std::size_t>(i) + 1] * frac;
    }
    return eval(x);
  }
};

RealFunction::RealFunction() {
  auto impl = std::make_shared<Impl>();
  impl->eval = [](double) { return 0.0; };
  impl->label = "zero";
  impl->registry_name = "zero";
  impl->flag.positive = true;
  impl_ = std::move(impl);
}

RealFunction RealFunction::closed_form(std::string label, std::function<double(double)> eval,
                                       ConeFlag flag, std::string registry_name) {
  auto impl = std::make_shared<Impl>();
  impl->eval = std::move(eval);
  impl->label = std::move(label);
  impl->registry_name = std::move(registry_name);
  impl->flag = flag;
  return RealFunction(std::move(impl));
}

RealFunction RealFunction::sampled(const GridSpec& grid, std::vector<double> values,
                                   std::string label, ConeFlag flag) {
  grid.validate();
  if (static_cast<int>(values.size()) != grid.n)
    throw precondition_error("sampled: value count must equal grid size");
  for (double v : values)
    if (!std::isfinite(v)) throw precondition_error("sampled: non-finite sample value");
  auto impl = std::make_shared<Impl>();
  impl->samples = {grid, std::move(values)};
  impl->label = std::move(label);
  impl->flag = flag;
  return RealFunction(std::move(impl));
}

RealFunction RealFunction::piecewise(PiecewiseAffineFunction pa, std::string label, ConeFlag flag) {
  pa.validate();
  auto impl = std::make_shared<Impl>();
  impl->pa = std::move(pa);
  impl->label = std::move(label);
  impl->flag = flag;
  return RealFunction(std::move(impl));
}

double RealFunction::operator()(double x) const { return impl_->value(x); }

std::vector<double> RealFunction::eval_on(const GridSpec& grid) const {
  grid.validate();
  std::vector<double> out(static_cast<std::size_t>(grid.n));
  const Impl* impl = impl_.get();
  parallel_for(grid.n, [&](int i) { out[static_cast<std::size_t>(i)] = impl->value(grid.point(i)); });
  for (int i = 0; i < grid.n; ++i)
    if (!std::isfinite(out[static_cast<std::size_t>(i)]))
      throw eval_error("non-finite value of '" + impl_->label + "' at x=" +
                       std::to_string(grid.point(i)));
  return out;
}

const std::string& RealFunction::label() const { return impl_->label; }
const ConeFlag& RealFunction::flag() const { return impl_->flag; }

bool RealFunction::is_piecewise_affine() const { return impl_->pa.has_value(); }
const PiecewiseAffineFunction* RealFunction::piecewise_affine() const {
  return impl_->pa ? &*impl_->pa : nullptr;
}
bool RealFunction::is_sampled() const { return impl_->samples.has_value(); }

RealFunction RealFunction::with_flag(ConeFlag flag) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->flag = flag;
  return RealFunction(std::move(impl));
}

RealFunction RealFunction::with_label(std::string label) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->label = std::move(label);
  return RealFunction(std::move(impl));
}

namespace {

ordered_json flag_to_json(const ConeFlag& f) {
  ordered_json j;
  j["positive"] = f.positive;
  if (f.compact_support) j["support"] = {f.compact_support->lo, f.compact_support->hi};
  return j;
}

ConeFlag flag_from_json(const ordered_json& j) {
  ConeFlag f;
  f.positive = j.value("positive", false);
  if (j.contains("support")) {
    f.compact_support = SupportInterval{j["support"][0].get<double>(), j["support"][1].get<double>()};
  }
  return f;
}

std::vector<double> parse_args(const std::string& spec, std::string& name) {
  const auto open = spec.find('(');
  if (open == std::string::npos) {
    name = spec;
    return {};
  }
  if (spec.back() != ')') throw parse_error("bad function spec: " + spec);
  name = spec.substr(0, open);
  std::vector<double> args;
  std::string body = spec.substr(open + 1, spec.size() - open - 2);
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      args.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw parse_error("bad numeric argument in function spec: " + spec);
    }
  }
  return args;
}

void need_args(const std::string& spec, const std::vector<double>& args, std::size_t n) {
  if (args.size() != n) throw parse_error("function spec '" + spec + "' needs " +
                                          std::to_string(n) + " argument(s)");
}

}  // namespace

ordered_json RealFunction::to_json() const {
  ordered_json j;
  if (impl_->pa) {
    j["repr"] = "pa";
    j["knots"] = impl_->pa->knots;
    j["slopes"] = impl_->pa->slopes;
    j["intercepts"] = impl_->pa->intercepts;
    j["label"] = impl_->label;
  } else if (impl_->samples) {
    j["repr"] = "sampled";
    const GridSpec& g = impl_->samples->first;
    j["grid"] = {{"x_lo", g.x_lo}, {"x_hi", g.x_hi}, {"n", g.n}};
    j["values"] = impl_->samples->second;
    j["label"] = impl_->label;
  } else {
    if (impl_->registry_name.empty())
      throw parse_error("cannot serialize anonymous closed-form function '" + impl_->label + "'");
    j["repr"] = "closed";
    j["name"] = impl_->registry_name;
  }
  const ordered_json f = flag_to_json(impl_->flag);
  if (impl_->flag.positive || impl_->flag.compact_support) j["flag"] = f;
  return j;
}

RealFunction RealFunction::from_json(const ordered_json& j) {
  const std::string repr = j.value("repr", "");
  RealFunction r;
  if (repr == "closed") {
    r = from_registry(j.at("name").get<std::string>());
  } else if (repr == "pa") {
    PiecewiseAffineFunction pa;
    pa.knots = j.at("knots").get<std::vector<double>>();
    pa.slopes = j.at("slopes").get<std::vector<double>>();
    pa.intercepts = j.at("intercepts").get<std::vector<double>>();
    r = piecewise(std::move(pa), j.value("label", "pa"));
  } else if (repr == "sampled") {
    const auto& g = j.at("grid");
    GridSpec grid(g.at("x_lo").get<double>(), g.at("x_hi").get<double>(), g.at("n").get<int>());
    r = sampled(grid, j.at("values").get<std::vector<double>>(), j.value("label", "sampled"));
  } else {
    throw parse_error("unknown function repr: '" + repr + "'");
  }
  if (j.contains("flag")) r = r.with_flag(flag_from_json(j["flag"]));
  return r;
}

RealFunction RealFunction::from_registry(const std::string& spec) {
  std::string name;
  const std::vector<double> args = parse_args(spec, name);
  if (name == "zero") return rf_zero();
  if (name == "one") return rf_one();
  if (name == "const") {
    need_args(spec, args, 1);
    return rf_const(args[0]);
  }
  if (name == "identity") return rf_identity();
  if (name == "abs") return rf_abs();
  if (name == "square")
    return closed_form("square", [](double x) { return x * x; }, ConeFlag{true, std::nullopt},
                       "square");
  if (name == "sin")
    return closed_form("sin", [](double x) { return std::sin(x); }, ConeFlag{}, "sin");
  if (name == "one_plus_abs") return rf_one_plus_abs();
  if (name == "clip_one_plus_abs") {
    need_args(spec, args, 1);
    return rf_clip_one_plus_abs(args[0]);
  }
  if (name == "hat") {
    need_args(spec, args, 3);
    return rf_hat(args[0], args[1], args[2]);
  }
  if (name == "plateau") {
    need_args(spec, args, 1);
    return rf_plateau(args[0]);
  }
  if (name == "gauss") {
    need_args(spec, args, 1);
    return rf_gauss(args[0]);
  }
  if (name == "lp_singular") {
    need_args(spec, args, 1);
    return rf_lp_singular(args[0]);
  }
  if (name == "clip_lp_singular") {
    need_args(spec, args, 2);
    const double p = args[0], cap = args[1];
    if (!(p > 0.0) || !(cap > 0.0)) throw parse_error("clip_lp_singular needs p > 0, cap > 0");
    const double e = 1.0 / (2.0 * p);
    return closed_form(spec,
                       [e, cap](double x) { return std::min(cap, std::pow(std::fabs(x - 0.5), -e)); },
                       ConeFlag{true, std::nullopt}, spec);
  }
  throw parse_error("unknown registry function: '" + spec + "'");
}

RealFunction rf_zero() { return RealFunction(); }

RealFunction rf_one() {
  return RealFunction::closed_form("one", [](double) { return 1.0; }, ConeFlag{true, std::nullopt},
                                   "one");
}

RealFunction rf_const(double c) {
  const std::string name = "const(" + std::to_string(c) + ")";
  return RealFunction::closed_form(name, [c](double) { return c; },
                                   ConeFlag{c >= 0.0, std::nullopt}, name);
}

RealFunction rf_identity() {
  return RealFunction::closed_form("identity", [](double x) { return x; }, ConeFlag{}, "identity");
}

RealFunction rf_abs() {
  PiecewiseAffineFunction pa;
  pa.knots = {0.0};
  pa.slopes = {-1.0, 1.0};
  pa.intercepts = {0.0, 0.0};
  return RealFunction::piecewise(std::move(pa), "abs", ConeFlag{true, std::nullopt});
}

RealFunction rf_one_plus_abs() {
  PiecewiseAffineFunction pa;
  pa.knots = {0.0};
  pa.slopes = {-1.0, 1.0};
  pa.intercepts = {1.0, 1.0};
  return RealFunction::piecewise(std::move(pa), "one_plus_abs", ConeFlag{true, std::nullopt});
}

RealFunction rf_clip_one_plus_abs(double cap) {
  if (!(cap > 1.0)) throw precondition_error("clip_one_plus_abs: cap must exceed 1");
  const double k = cap - 1.0;
  PiecewiseAffineFunction pa;
  pa.knots = {-k, 0.0, k};
  pa.slopes = {0.0, -1.0, 1.0, 0.0};
  pa.intercepts = {cap, 1.0, 1.0, cap};
  const std::string name = "clip_one_plus_abs(" + std::to_string(cap) + ")";
  auto f = RealFunction::piecewise(std::move(pa), name, ConeFlag{true, std::nullopt});
  return f;
}

RealFunction rf_hat(double center, double halfwidth, double height) {
  if (!(halfwidth > 0.0)) throw precondition_error("hat: halfwidth must be positive");
  const auto pa = PiecewiseAffineFunction::interpolating(
      {{center - halfwidth, 0.0}, {center, height}, {center + halfwidth, 0.0}});
  std::ostringstream label;
  label << "hat(" << center << "," << halfwidth << "," << height << ")";
  ConeFlag flag{height >= 0.0, SupportInterval{center - halfwidth, center + halfwidth}};
  return RealFunction::piecewise(pa, label.str(), flag);
}

RealFunction rf_plateau(double halfwidth) {
  if (!(halfwidth > 0.0)) throw precondition_error("plateau: halfwidth must be positive");
  const auto pa = PiecewiseAffineFunction::interpolating({{-halfwidth - 1.0, 0.0},
                                                          {-halfwidth, 1.0},
                                                          {halfwidth, 1.0},
                                                          {halfwidth + 1.0, 0.0}});
  std::ostringstream label;
  label << "plateau(" << halfwidth << ")";
  ConeFlag flag{true, SupportInterval{-halfwidth - 1.0, halfwidth + 1.0}};
  return RealFunction::piecewise(pa, label.str(), flag);
}

RealFunction rf_gauss(double sigma) {
  if (!(sigma > 0.0)) throw precondition_error("gauss: sigma must be positive");
  const double s2 = 2.0 * sigma * sigma;
  std::ostringstream label;
  label << "gauss(" << sigma << ")";
  return RealFunction::closed_form(label.str(), [s2](double x) { return std::exp(-x * x / s2); },
                                   ConeFlag{true, std::nullopt}, label.str());
}

RealFunction rf_lp_singular(double p) {
  if (!(p > 0.0)) throw precondition_error("lp_singular: p must be positive");
  const double e = 1.0 / (2.0 * p);
  std::ostringstream label;
  label << "lp_singular(" << p << ")";
  return RealFunction::closed_form(label.str(),
                                   [e](double x) { return std::pow(std::fabs(x - 0.5), -e); },
                                   ConeFlag{true, std::nullopt}, label.str());
}

}  // namespace latticeflow
