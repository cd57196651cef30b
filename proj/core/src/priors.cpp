#include "gmix/priors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gmix/errors.hpp"

namespace gmix {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " must be > 0");
  return v;
}

// Beta-prime log density with explicit g -> 0+ limit handling.
double beta_prime_log_density(double gamma0, double gamma1, double g) {
  if (g < 0.0) throw InvalidInput("log_density requires g >= 0");
  const double log_norm = std::lgamma(gamma0 + gamma1) - std::lgamma(gamma0) - std::lgamma(gamma1);
  if (g == 0.0) {
    if (gamma0 > 1.0) return -kInf;
    if (gamma0 == 1.0) return log_norm;
    return kInf;  // integrable singularity at the origin
  }
  return log_norm + (gamma0 - 1.0) * std::log(g) - (gamma0 + gamma1) * std::log1p(g);
}

Mode beta_prime_mode(double gamma0, double gamma1) {
  if (gamma0 > 1.0) return {Mode::Kind::kInterior, (gamma0 - 1.0) / (gamma1 + 1.0)};
  return {Mode::Kind::kBoundary, 0.0};
}

}  // namespace

ScaledInvChiSq::ScaledInvChiSq(double nu_in, double tau2_in)
    : nu(require_positive(nu_in, "nu")), tau2(require_positive(tau2_in, "tau2")) {}

BetaPrime::BetaPrime(double g0, double g1)
    : gamma0(require_positive(g0, "gamma0")), gamma1(require_positive(g1, "gamma1")) {}

ZellnerSiow::ZellnerSiow(int n_in) : n(n_in) {
  if (n < 1) throw InvalidInput("ZellnerSiow requires n >= 1");
}

HyperG::HyperG(double a_in) : a(a_in) {
  if (!(a > 2.0)) throw InvalidInput("hyper-g requires a > 2");
}

HyperGOverN::HyperGOverN(double a_in, int n_in) : a(a_in), n(n_in) {
  if (!(a > 2.0)) throw InvalidInput("hyper-g/n requires a > 2");
  if (n < 1) throw InvalidInput("hyper-g/n requires n >= 1");
}

GeneralizedG::GeneralizedG(double b, int n_in, int p_alpha_in)
    : b_param(b), n(n_in), p_alpha(p_alpha_in) {
  if (!(b_param < 0.5)) throw InvalidInput("generalized-g requires B < 1/2");
  if (n < 3) throw InvalidInput("generalized-g requires n >= 3");
  if (p_alpha < 0 || p_alpha >= n) throw InvalidInput("generalized-g requires 0 <= p_alpha < n");
  const double gamma0 = (n - p_alpha - 1) / 2.0 - b_param + 1.0;
  if (!(gamma0 > 0.0)) throw InvalidInput("generalized-g shape (n-p_alpha-1)/2 - B + 1 must be > 0");
}

RobustPrior::RobustPrior(double a_in, double b_in, RhoRule rule, double rho_const, int n_in,
                         int p_alpha_in)
    : a(require_positive(a_in, "A")),
      b(require_positive(b_in, "B")),
      rho_rule(rule),
      rho_constant(rho_const),
      n(n_in),
      p_alpha(p_alpha_in) {
  if (n < 1) throw InvalidInput("robust prior requires n >= 1");
  if (p_alpha < 0) throw InvalidInput("robust prior requires p_alpha >= 0");
  const double r = rho();
  if (!(r > b / (b + n)))
    throw InvalidInput("robust prior requires rho > B/(B+n) so the support stays positive");
}

double RobustPrior::rho() const {
  return rho_rule == RhoRule::kConstant ? rho_constant : 1.0 / (1.0 + p_alpha);
}

FixedG::FixedG(double g_in) : g(require_positive(g_in, "g")) {}

double log_density(const GMixturePrior& prior, double g) {
  if (g < 0.0) throw InvalidInput("log_density requires g >= 0");
  return std::visit(
      [g](const auto& pr) -> double {
        using T = std::decay_t<decltype(pr)>;
        if constexpr (std::is_same_v<T, ScaledInvChiSq>) {
          if (g == 0.0) return -kInf;
          const double half_scale = pr.tau2 * pr.nu / 2.0;
          return 0.5 * pr.nu * std::log(half_scale) - std::lgamma(pr.nu / 2.0) - half_scale / g -
                 (1.0 + pr.nu / 2.0) * std::log(g);
        } else if constexpr (std::is_same_v<T, BetaPrime>) {
          return beta_prime_log_density(pr.gamma0, pr.gamma1, g);
        } else if constexpr (std::is_same_v<T, ZellnerSiow>) {
          if (g == 0.0) return -kInf;
          const double half_scale = pr.n / 2.0;
          return 0.5 * std::log(half_scale) - std::lgamma(0.5) - half_scale / g - 1.5 * std::log(g);
        } else if constexpr (std::is_same_v<T, HyperG>) {
          return std::log(pr.a / 2.0 - 1.0) - (pr.a / 2.0) * std::log1p(g);
        } else if constexpr (std::is_same_v<T, HyperGOverN>) {
          return std::log(pr.a / 2.0 - 1.0) - std::log(static_cast<double>(pr.n)) -
                 (pr.a / 2.0) * std::log1p(g / pr.n);
        } else if constexpr (std::is_same_v<T, GeneralizedG>) {
          const double gamma0 = (pr.n - pr.p_alpha - 1) / 2.0 - pr.b_param + 1.0;
          return beta_prime_log_density(gamma0, pr.b_param + 1.0, g);
        } else if constexpr (std::is_same_v<T, RobustPrior>) {
          if (g <= pr.g0()) return -kInf;
          return std::log(pr.a) + pr.a * std::log(pr.rho() * (pr.n + pr.b)) -
                 (pr.a + 1.0) * std::log(g + pr.b);
        } else {
          static_assert(std::is_same_v<T, FixedG>);
          throw UnsupportedOperation("a point mass at g has no density");
        }
      },
      prior);
}

Mode mode(const GMixturePrior& prior) {
  return std::visit(
      [](const auto& pr) -> Mode {
        using T = std::decay_t<decltype(pr)>;
        if constexpr (std::is_same_v<T, ScaledInvChiSq>) {
          return {Mode::Kind::kInterior, pr.tau2 * pr.nu / (pr.nu + 2.0)};
        } else if constexpr (std::is_same_v<T, BetaPrime>) {
          return beta_prime_mode(pr.gamma0, pr.gamma1);
        } else if constexpr (std::is_same_v<T, ZellnerSiow>) {
          return {Mode::Kind::kInterior, pr.n / 3.0};
        } else if constexpr (std::is_same_v<T, HyperG>) {
          return {Mode::Kind::kBoundary, 0.0};
        } else if constexpr (std::is_same_v<T, HyperGOverN>) {
          return {Mode::Kind::kBoundary, 0.0};
        } else if constexpr (std::is_same_v<T, GeneralizedG>) {
          const double gamma0 = (pr.n - pr.p_alpha - 1) / 2.0 - pr.b_param + 1.0;
          return beta_prime_mode(gamma0, pr.b_param + 1.0);
        } else if constexpr (std::is_same_v<T, RobustPrior>) {
          return {Mode::Kind::kBoundary, pr.g0()};  // density decreasing on (g0, inf)
        } else {
          static_assert(std::is_same_v<T, FixedG>);
          return {Mode::Kind::kPointMass, pr.g};
        }
      },
      prior);
}

double support_lower_bound(const GMixturePrior& prior) {
  if (const auto* robust = std::get_if<RobustPrior>(&prior)) return robust->g0();
  return 0.0;
}

double tail_index(const GMixturePrior& prior) {
  return std::visit(
      [](const auto& pr) -> double {
        using T = std::decay_t<decltype(pr)>;
        if constexpr (std::is_same_v<T, ScaledInvChiSq>) {
          return pr.nu / 2.0;
        } else if constexpr (std::is_same_v<T, BetaPrime>) {
          return pr.gamma1;
        } else if constexpr (std::is_same_v<T, ZellnerSiow>) {
          return 0.5;
        } else if constexpr (std::is_same_v<T, HyperG>) {
          return pr.a / 2.0 - 1.0;
        } else if constexpr (std::is_same_v<T, HyperGOverN>) {
          return pr.a / 2.0 - 1.0;
        } else if constexpr (std::is_same_v<T, GeneralizedG>) {
          return pr.b_param + 1.0;
        } else if constexpr (std::is_same_v<T, RobustPrior>) {
          return pr.a;
        } else {
          return kInf;
        }
      },
      prior);
}

double scale_hint(const GMixturePrior& prior) {
  return std::visit(
      [](const auto& pr) -> double {
        using T = std::decay_t<decltype(pr)>;
        if constexpr (std::is_same_v<T, ScaledInvChiSq>) {
          return pr.tau2 * pr.nu;
        } else if constexpr (std::is_same_v<T, BetaPrime>) {
          return 1.0 + beta_prime_mode(pr.gamma0, pr.gamma1).location;
        } else if constexpr (std::is_same_v<T, ZellnerSiow>) {
          return static_cast<double>(pr.n);
        } else if constexpr (std::is_same_v<T, HyperG>) {
          return 1.0;
        } else if constexpr (std::is_same_v<T, HyperGOverN>) {
          return static_cast<double>(pr.n);
        } else if constexpr (std::is_same_v<T, GeneralizedG>) {
          return static_cast<double>(pr.n);
        } else if constexpr (std::is_same_v<T, RobustPrior>) {
          return pr.g0() + pr.n;
        } else {
          static_assert(std::is_same_v<T, FixedG>);
          return pr.g;
        }
      },
      prior);
}

std::string describe(const GMixturePrior& prior) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& pr) {
        using T = std::decay_t<decltype(pr)>;
        if constexpr (std::is_same_v<T, ScaledInvChiSq>) {
          os << "sics(nu=" << pr.nu << ",tau2=" << pr.tau2 << ")";
        } else if constexpr (std::is_same_v<T, BetaPrime>) {
          os << "beta-prime(gamma0=" << pr.gamma0 << ",gamma1=" << pr.gamma1 << ")";
        } else if constexpr (std::is_same_v<T, ZellnerSiow>) {
          os << "zellner-siow(n=" << pr.n << ")";
        } else if constexpr (std::is_same_v<T, HyperG>) {
          os << "hyper-g(a=" << pr.a << ")";
        } else if constexpr (std::is_same_v<T, HyperGOverN>) {
          os << "hyper-g-n(a=" << pr.a << ",n=" << pr.n << ")";
        } else if constexpr (std::is_same_v<T, GeneralizedG>) {
          os << "generalized-g(B=" << pr.b_param << ",n=" << pr.n << ",p_alpha=" << pr.p_alpha
             << ")";
        } else if constexpr (std::is_same_v<T, RobustPrior>) {
          os << "robust(A=" << pr.a << ",B=" << pr.b << ",rho=" << pr.rho() << ",n=" << pr.n
             << ")";
        } else {
          static_assert(std::is_same_v<T, FixedG>);
          os << "fixed-g(g=" << pr.g << ")";
        }
      },
      prior);
  return os.str();
}

GMixturePrior make_sics_prior(int n, int p, SicsVariant variant) {
  if (n < 3) throw InvalidInput("make_sics_prior requires n >= 3");
  if (p < 1) throw InvalidInput("make_sics_prior requires p >= 1");
  if (p >= n)
    throw InvalidRegime("make_sics_prior requires p < n (got p = " + std::to_string(p) +
                        ", n = " + std::to_string(n) + ")");
  const double tau2 = static_cast<double>(n) * static_cast<double>(n);
  const double nu = variant == SicsVariant::kNu1 ? 1.0 : static_cast<double>(p);
  return ScaledInvChiSq(nu, tau2);
}

// --------------------------- symbolic specs --------------------------------

SymbolicValue SymbolicValue::parse(const std::string& text) {
  if (text == "n") return {Kind::kN, 0.0};
  if (text == "p") return {Kind::kP, 0.0};
  if (text == "n^2") return {Kind::kNSquared, 0.0};
  if (text == "p^2") return {Kind::kPSquared, 0.0};
  if (text == "max(n,p^2)") return {Kind::kMaxNP2, 0.0};
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw InvalidInput("cannot parse value '" + text + "' (expected a number or n, p, n^2, p^2, max(n,p^2))");
  }
  if (pos != text.size())
    throw InvalidInput("trailing characters in value '" + text + "'");
  return {Kind::kNumber, v};
}

double SymbolicValue::resolve(int n, int p) const {
  const double dn = static_cast<double>(n);
  const double dp = static_cast<double>(p);
  switch (kind) {
    case Kind::kNumber: return number;
    case Kind::kN: return dn;
    case Kind::kP: return dp;
    case Kind::kNSquared: return dn * dn;
    case Kind::kPSquared: return dp * dp;
    case Kind::kMaxNP2: return std::max(dn, dp * dp);
  }
  throw InvalidInput("unreachable symbolic kind");
}

std::string SymbolicValue::to_string() const {
  switch (kind) {
    case Kind::kNumber: {
      std::ostringstream os;
      os << number;
      return os.str();
    }
    case Kind::kN: return "n";
    case Kind::kP: return "p";
    case Kind::kNSquared: return "n^2";
    case Kind::kPSquared: return "p^2";
    case Kind::kMaxNP2: return "max(n,p^2)";
  }
  return "?";
}

namespace {

struct FamilyInfo {
  PriorSpec::Family family;
  std::map<std::string, SymbolicValue> defaults;
};

FamilyInfo family_info(const std::string& name) {
  using Family = PriorSpec::Family;
  if (name == "sics" || name == "scaled-inv-chisq")
    return {Family::kScaledInvChiSq,
            {{"nu", SymbolicValue::of(1.0)}, {"tau2", SymbolicValue{SymbolicValue::Kind::kNSquared, 0.0}}}};
  if (name == "sics-nu1")
    return {Family::kScaledInvChiSq,
            {{"nu", SymbolicValue::of(1.0)}, {"tau2", SymbolicValue{SymbolicValue::Kind::kNSquared, 0.0}}}};
  if (name == "sics-nup")
    return {Family::kScaledInvChiSq,
            {{"nu", SymbolicValue{SymbolicValue::Kind::kP, 0.0}},
             {"tau2", SymbolicValue{SymbolicValue::Kind::kNSquared, 0.0}}}};
  if (name == "beta-prime") return {Family::kBetaPrime, {}};
  if (name == "zellner-siow") return {Family::kZellnerSiow, {}};
  if (name == "hyper-g") return {Family::kHyperG, {{"a", SymbolicValue::of(3.0)}}};
  if (name == "hyper-g-n") return {Family::kHyperGOverN, {{"a", SymbolicValue::of(3.0)}}};
  if (name == "generalized-g") return {Family::kGeneralizedG, {{"b", SymbolicValue::of(0.25)}}};
  if (name == "robust")
    return {Family::kRobust, {{"a", SymbolicValue::of(0.5)}, {"b", SymbolicValue::of(1.0)}}};
  if (name == "fixed-g")
    return {Family::kFixedG, {{"g", SymbolicValue{SymbolicValue::Kind::kNSquared, 0.0}}}};
  throw InvalidInput("unknown prior family '" + name + "'");
}

}  // namespace

PriorSpec PriorSpec::parse(const std::string& text) {
  PriorSpec spec;
  std::string family_name = text;
  std::string args;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    family_name = text.substr(0, colon);
    args = text.substr(colon + 1);
  }
  const FamilyInfo info = family_info(family_name);
  spec.family_ = info.family;
  spec.params_ = info.defaults;
  spec.name_ = family_name;

  std::istringstream stream(args);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw InvalidInput("prior parameter '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "rho") {
      if (value == "1/(1+p_alpha)") {
        spec.rho_rule_ = RhoRule::kInverseDimension;
      } else {
        spec.rho_rule_ = RhoRule::kConstant;
        spec.params_["rho"] = SymbolicValue::parse(value);
      }
      continue;
    }
    spec.params_[key] = SymbolicValue::parse(value);
  }

  if (spec.family_ == Family::kBetaPrime &&
      (!spec.params_.count("gamma0") || !spec.params_.count("gamma1")))
    throw InvalidInput("beta-prime requires gamma0 and gamma1");
  return spec;
}

std::vector<PriorSpec> PriorSpec::default_competitors() {
  return {parse("zellner-siow"), parse("hyper-g-n"), parse("generalized-g"),
          parse("robust"),       parse("sics-nu1"),  parse("sics-nup")};
}

double PriorSpec::param(const std::string& key, int n, int p) const {
  const auto it = params_.find(key);
  if (it == params_.end()) throw InvalidInput("prior '" + name_ + "' is missing parameter " + key);
  return it->second.resolve(n, p);
}

GMixturePrior PriorSpec::instantiate(int n, int p, int p_alpha) const {
  switch (family_) {
    case Family::kScaledInvChiSq:
      return ScaledInvChiSq(param("nu", n, p), param("tau2", n, p));
    case Family::kBetaPrime:
      return BetaPrime(param("gamma0", n, p), param("gamma1", n, p));
    case Family::kZellnerSiow:
      return ZellnerSiow(n);
    case Family::kHyperG:
      return HyperG(param("a", n, p));
    case Family::kHyperGOverN:
      return HyperGOverN(param("a", n, p), n);
    case Family::kGeneralizedG:
      return GeneralizedG(param("b", n, p), n, p_alpha);
    case Family::kRobust: {
      const double rho = rho_rule_ == RhoRule::kConstant
                             ? (params_.count("rho") ? param("rho", n, p) : 0.5)
                             : 0.0;
      return RobustPrior(param("a", n, p), param("b", n, p), rho_rule_, rho, n, p_alpha);
    }
    case Family::kFixedG:
      return FixedG(param("g", n, p));
  }
  throw InvalidInput("unreachable prior family");
}

}  // namespace gmix
