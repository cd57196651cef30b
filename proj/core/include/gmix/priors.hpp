#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace gmix {

// ---------------------------------------------------------------------------
// Mixture families on the g scale. All continuous members are proper
// densities on their support; FixedG is a point mass. Values are immutable;
// every operation here is pure.
// ---------------------------------------------------------------------------

/// pi(g) = ((tau2 nu/2)^{nu/2}/Gamma(nu/2)) exp(-tau2 nu/(2g)) / g^{1+nu/2},
/// i.e. inverse-gamma with shape nu/2 and scale tau2 nu/2. Unique interior
/// mode at tau2 nu/(nu+2).
struct ScaledInvChiSq {
  double nu;
  double tau2;
  ScaledInvChiSq(double nu_in, double tau2_in);
};

/// pi(g) = B(gamma0,gamma1)^{-1} g^{gamma0-1} (1+g)^{-(gamma0+gamma1)}.
struct BetaPrime {
  double gamma0;
  double gamma1;
  BetaPrime(double g0, double g1);
};

/// Inverse-gamma with shape 1/2 and scale n/2 (equals ScaledInvChiSq with
/// nu = 1, tau2 = n).
struct ZellnerSiow {
  int n;
  explicit ZellnerSiow(int n_in);
};

/// Beta-prime with gamma0 = 1, gamma1 = a/2 - 1; J-shaped, mode at 0.
struct HyperG {
  double a;
  explicit HyperG(double a_in);
};

/// g/n follows HyperG(a).
struct HyperGOverN {
  double a;
  int n;
  HyperGOverN(double a_in, int n_in);
};

/// Beta-prime with gamma0 = A+1, A = (n - p_alpha - 1)/2 - B, gamma1 = B+1.
/// Model-dependent through p_alpha.
struct GeneralizedG {
  double b_param;  // B < 1/2
  int n;
  int p_alpha;
  GeneralizedG(double b, int n_in, int p_alpha_in);
};

enum class RhoRule { kConstant, kInverseDimension };

/// Truncated scaled beta-prime: (g+B)/(rho (n+B)) - 1 ~ BetaPrime(1, A) on
/// g > g0 = rho (n+B) - B. Model-dependent when rho = 1/(1+p_alpha).
struct RobustPrior {
  double a;  // A > 0
  double b;  // B > 0
  RhoRule rho_rule;
  double rho_constant;  // used when rho_rule == kConstant
  int n;
  int p_alpha;
  RobustPrior(double a_in, double b_in, RhoRule rule, double rho_const, int n_in, int p_alpha_in);
  double rho() const;
  double g0() const { return rho() * (n + b) - b; }
};

/// Point mass at g.
struct FixedG {
  double g;
  explicit FixedG(double g_in);
};

using GMixturePrior = std::variant<ScaledInvChiSq, BetaPrime, ZellnerSiow, HyperG, HyperGOverN,
                                   GeneralizedG, RobustPrior, FixedG>;

/// Log density at g > 0 (g = 0 is accepted and evaluates the g -> 0+ limit).
/// Returns -infinity outside the support. Throws UnsupportedOperation for
/// FixedG: a point mass has no density.
double log_density(const GMixturePrior& prior, double g);

struct Mode {
  enum class Kind { kInterior, kBoundary, kPointMass } kind;
  double location;
};

/// Analytic argmax of the density. J-shaped members report a boundary mode
/// rather than an error.
Mode mode(const GMixturePrior& prior);

/// Infimum of the support (0 for all members except the robust prior).
double support_lower_bound(const GMixturePrior& prior);

/// t such that pi(g) ~ g^{-1-t} as g -> infinity; +infinity for FixedG.
/// Controls whether the saturated-fit limit integral diverges.
double tail_index(const GMixturePrior& prior);

/// Rough location of the prior mass, used to seed quadrature panels.
double scale_hint(const GMixturePrior& prior);

std::string describe(const GMixturePrior& prior);

enum class SicsVariant { kNu1, kNuP };

/// The library's flagship mixtures: ScaledInvChiSq with tau2 = n^2 and
/// nu = 1 (kNu1) or nu = p (kNuP). Requires 3 <= n and 1 <= p < n.
GMixturePrior make_sics_prior(int n, int p, SicsVariant variant);

// ---------------------------------------------------------------------------
// Symbolic prior specifications: hyperparameters may be written in terms of
// n and p and are resolved per dataset (and per model for the families whose
// parameters involve p(alpha)).
// ---------------------------------------------------------------------------

struct SymbolicValue {
  enum class Kind { kNumber, kN, kP, kNSquared, kPSquared, kMaxNP2 };
  Kind kind = Kind::kNumber;
  double number = 0.0;

  static SymbolicValue of(double v) { return {Kind::kNumber, v}; }
  static SymbolicValue parse(const std::string& text);
  double resolve(int n, int p) const;
  std::string to_string() const;
};

class PriorSpec {
 public:
  enum class Family {
    kScaledInvChiSq,
    kBetaPrime,
    kZellnerSiow,
    kHyperG,
    kHyperGOverN,
    kGeneralizedG,
    kRobust,
    kFixedG,
  };

  /// Accepts "family" or "family:key=value,key=value". Family names:
  /// sics, sics-nu1, sics-nup, beta-prime, zellner-siow, hyper-g, hyper-g-n,
  /// generalized-g, robust, fixed-g. Values may be numbers or the symbols
  /// n, p, n^2, p^2, max(n,p^2).
  static PriorSpec parse(const std::string& text);

  /// The six mixtures used by the bundled replication studies, in report
  /// order: zellner-siow, hyper-g-n, generalized-g, robust, sics-nu1,
  /// sics-nup.
  static std::vector<PriorSpec> default_competitors();

  GMixturePrior instantiate(int n, int p, int p_alpha) const;
  const std::string& name() const { return name_; }
  Family family() const { return family_; }
  bool is_fixed_g() const { return family_ == Family::kFixedG; }

 private:
  std::string name_;
  Family family_ = Family::kScaledInvChiSq;
  std::map<std::string, SymbolicValue> params_;
  RhoRule rho_rule_ = RhoRule::kInverseDimension;

  double param(const std::string& key, int n, int p) const;
  friend class PriorSpecBuilder;
};

}  // namespace gmix
