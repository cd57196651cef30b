#include "gmix/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gmix/errors.hpp"
#include "gmix/quadrature.hpp"
#include "gmix/regression.hpp"
#include "gmix/rng.hpp"

namespace gmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct TopTracker {
  bool has = false;
  double score = kNegInf;
  ModelIndex model;

  void offer(double s, const ModelIndex& m) {
    if (!has || ranks_above(s, m, score, model)) {
      has = true;
      score = s;
      model = m;
    }
  }
};

SearchResult finalize(const std::vector<std::pair<ModelIndex, double>>& scored) {
  SearchResult result;
  double lse = kNegInf;
  TopTracker top;
  for (const auto& [model, score] : scored) {
    lse = log_add_exp(lse, score);
    top.offer(score, model);
  }
  for (const auto& [model, score] : scored) result.probs[model] = std::exp(score - lse);
  result.top = top.model;
  return result;
}

}  // namespace

bool ranks_above(double score_a, const ModelIndex& a, double score_b, const ModelIndex& b) {
  if (score_a != score_b) return score_a > score_b;
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

ModelScorer::ModelScorer(const Dataset& d, const PriorSpec& prior, const ModelPrior& mp,
                         double tol)
    : d_(d), prior_(prior), mp_(mp), tol_(tol) {}

double ModelScorer::log_score(std::uint64_t mask) {
  if (const auto it = cache_.find(mask); it != cache_.end()) {
    ++hits_;
    return it->second;
  }
  const ModelIndex alpha = ModelIndex::from_mask(mask);
  const int p_alpha = alpha.size();
  double score = log_model_prior_mass(mp_, p_alpha, d_.p());
  if (p_alpha > 0) {
    const RegressionStats stats = fit_stats(d_, alpha);
    min_omr_ = std::min(min_omr_, stats.one_minus_r2);
    const GMixturePrior prior = prior_.instantiate(d_.n(), d_.p(), p_alpha);
    score += log_bf_integral(d_.n(), p_alpha, stats.one_minus_r2, prior, tol_).log_value;
  }
  cache_.emplace(mask, score);
  return score;
}

SearchResult enumerate_all(const Dataset& d, const PriorSpec& prior, const ModelPrior& mp,
                           const SearchOptions& opt) {
  const int p = d.p();
  if (p > opt.max_p_exhaustive)
    throw SpaceTooLarge("2^" + std::to_string(p) +
                        " models is beyond the exhaustive limit; use gibbs_search");
  ModelScorer scorer(d, prior, mp, opt.tol);
  const std::uint64_t count = std::uint64_t{1} << p;
  std::vector<std::pair<ModelIndex, double>> scored;
  scored.reserve(count);
  for (std::uint64_t mask = 0; mask < count; ++mask)
    scored.emplace_back(ModelIndex::from_mask(mask), scorer.log_score(mask));
  SearchResult result = finalize(scored);
  result.visited = scorer.distinct();
  result.min_one_minus_r2 = scorer.min_one_minus_r2();
  return result;
}

SearchResult enumerate_nested(const Dataset& d, const PriorSpec& prior, const ModelPrior& mp,
                              const SearchOptions& opt) {
  const int p = d.p();
  if (p > 64) throw InvalidInput("enumerate_nested supports at most 64 regressors");
  ModelScorer scorer(d, prior, mp, opt.tol);
  std::vector<std::pair<ModelIndex, double>> scored;
  scored.reserve(static_cast<std::size_t>(p) + 1);
  std::uint64_t mask = 0;
  scored.emplace_back(ModelIndex::null_model(), scorer.log_score(0));
  for (int j = 1; j <= p; ++j) {
    mask |= std::uint64_t{1} << (j - 1);
    scored.emplace_back(ModelIndex::from_mask(mask), scorer.log_score(mask));
  }
  SearchResult result = finalize(scored);
  result.visited = scorer.distinct();
  result.min_one_minus_r2 = scorer.min_one_minus_r2();
  return result;
}

SearchResult gibbs_search(const Dataset& d, const PriorSpec& prior, const ModelPrior& mp,
                          const GibbsOptions& opt) {
  const int p = d.p();
  if (p > 63) throw InvalidInput("gibbs_search supports at most 63 regressors");
  if (!(opt.chain_length > opt.burn_in && opt.burn_in >= 0))
    throw InvalidInput("gibbs_search requires chain_length > burn_in >= 0");

  ModelScorer scorer(d, prior, mp, opt.tol);
  Xoshiro256pp rng(opt.seed);
  std::uint64_t state = 0;  // null model
  std::unordered_map<std::uint64_t, long> occupied;

  for (long sweep = 1; sweep <= opt.chain_length; ++sweep) {
    const bool collect = sweep > opt.burn_in;
    for (int j = 0; j < p; ++j) {
      const std::uint64_t bit = std::uint64_t{1} << j;
      const double s1 = scorer.log_score(state | bit);
      const double s0 = scorer.log_score(state & ~bit);
      // P(gamma_j = 1 | rest) computed on the stable side of the logistic.
      const double delta = s1 - s0;
      double p1;
      if (delta >= 0.0) {
        p1 = 1.0 / (1.0 + std::exp(-delta));
      } else {
        const double e = std::exp(delta);
        p1 = e / (1.0 + e);
      }
      state = rng.uniform01() < p1 ? (state | bit) : (state & ~bit);
      if (collect) ++occupied[state];
    }
  }

  std::vector<std::uint64_t> keys;
  keys.reserve(occupied.size());
  for (const auto& [mask, cnt] : occupied) keys.push_back(mask);
  std::sort(keys.begin(), keys.end());

  std::vector<std::pair<ModelIndex, double>> scored;
  scored.reserve(keys.size());
  for (std::uint64_t mask : keys)
    scored.emplace_back(ModelIndex::from_mask(mask), scorer.log_score(mask));

  SearchResult result = finalize(scored);
  result.visited = scorer.distinct();
  result.chain_length = opt.chain_length;
  result.burn_in = opt.burn_in;
  result.seed = opt.seed;
  result.min_one_minus_r2 = scorer.min_one_minus_r2();
  for (std::uint64_t mask : keys) result.visit_counts[ModelIndex::from_mask(mask)] = occupied[mask];
  return result;
}

}  // namespace gmix
