#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <unordered_map>

#include "gmix/dataset.hpp"
#include "gmix/marginal.hpp"
#include "gmix/model_index.hpp"
#include "gmix/priors.hpp"

namespace gmix {

struct SearchResult {
  std::map<ModelIndex, double> probs;  // normalized over the evaluated/visited set
  long visited = 0;                    // distinct models whose marginal was computed
  ModelIndex top;                      // argmax; ties -> smaller p(alpha), then lexicographic
  long chain_length = 0;               // 0 for exhaustive/nested enumeration
  long burn_in = 0;
  std::uint64_t seed = 0;
  double min_one_minus_r2 = 1.0;  // smallest 1-R^2 seen across evaluated models
  std::map<ModelIndex, long> visit_counts;  // Gibbs only: occupied states after burn-in
};

struct SearchOptions {
  double tol = kDefaultQuadTol;
  int max_p_exhaustive = 20;
};

/// Strict total order used to pick `top`: higher score, ties to the smaller
/// model, then to the lexicographically smaller index set. A total order
/// makes the argmax independent of evaluation order.
bool ranks_above(double score_a, const ModelIndex& a, double score_b, const ModelIndex& b);

/// Per-search score cache: log p(M_alpha) + log of the Bayes-factor integral.
/// A model is evaluated at most once; the prefactor is model-independent and
/// omitted. Single-threaded by design (each search owns its cache).
class ModelScorer {
 public:
  ModelScorer(const Dataset& d, const PriorSpec& prior, const ModelPrior& mp, double tol);

  double log_score(std::uint64_t mask);
  long distinct() const { return static_cast<long>(cache_.size()); }
  long hits() const { return hits_; }
  double min_one_minus_r2() const { return min_omr_; }

 private:
  const Dataset& d_;
  const PriorSpec& prior_;
  ModelPrior mp_;
  double tol_;
  std::unordered_map<std::uint64_t, double> cache_;
  long hits_ = 0;
  double min_omr_ = 1.0;
};

/// Exact posterior over all 2^p models. Requires p <= max_p_exhaustive.
SearchResult enumerate_all(const Dataset& d, const PriorSpec& prior, const ModelPrior& mp,
                           const SearchOptions& opt = {});

/// Posterior over the nested chain {}, {1}, {1,2}, ..., {1..p} (p+1 models).
SearchResult enumerate_nested(const Dataset& d, const PriorSpec& prior, const ModelPrior& mp,
                              const SearchOptions& opt = {});

struct GibbsOptions {
  long chain_length = 10000;  // systematic sweeps over all p inclusion indicators
  long burn_in = 5000;
  std::uint64_t seed = 0;
  double tol = kDefaultQuadTol;
};

/// Systematic-scan Gibbs sampler over inclusion indicators, started from the
/// null model. Each coordinate's full conditional is proportional to
/// p(M) m(y), with marginals cached per model. After burn-in, the posterior
/// is estimated by renormalizing p(M) m(y) over the set of states the chain
/// occupied (not by visit frequencies). Deterministic given the seed.
SearchResult gibbs_search(const Dataset& d, const PriorSpec& prior, const ModelPrior& mp,
                          const GibbsOptions& opt = {});

}  // namespace gmix
