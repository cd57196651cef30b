#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gmix/errors.hpp"
#include "gmix/model_space.hpp"
#include "gmix/rng.hpp"
#include "gmix/simulation.hpp"
#include "oracles.hpp"

using namespace gmix;

namespace {

// Independent exhaustive posterior: Simpson-oracle marginals, long-double
// normalization, no shared code with the search paths.
std::map<ModelIndex, double> naive_posterior(const Dataset& d, const PriorSpec& spec,
                                             const ModelPrior& mp) {
  const int p = d.p();
  std::vector<std::pair<ModelIndex, long double>> weights;
  long double total = 0.0L;
  std::vector<double> logs;
  std::vector<ModelIndex> models;
  double shift = -1e300;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << p); ++mask) {
    const ModelIndex alpha = ModelIndex::from_mask(mask);
    double score = log_model_prior_mass(mp, alpha.size(), p);
    if (!alpha.is_null()) {
      const auto stats = fit_stats(d, alpha);
      const auto prior = spec.instantiate(d.n(), p, alpha.size());
      score += testing::simpson_log_bf(d.n(), alpha.size(), stats.one_minus_r2, prior, 40000);
    }
    logs.push_back(score);
    models.push_back(alpha);
    shift = std::max(shift, score);
  }
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const long double w = expl(static_cast<long double>(logs[i] - shift));
    weights.emplace_back(models[i], w);
    total += w;
  }
  std::map<ModelIndex, double> probs;
  for (const auto& [alpha, w] : weights) probs[alpha] = static_cast<double>(w / total);
  return probs;
}

double total_variation(const std::map<ModelIndex, double>& a,
                       const std::map<ModelIndex, double>& b) {
  double tv = 0.0;
  for (const auto& [model, pa] : a) {
    const auto it = b.find(model);
    tv += std::abs(pa - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [model, pb] : b)
    if (!a.count(model)) tv += pb;
  return 0.5 * tv;
}

}  // namespace

TEST_CASE("enumerate_all on p=1 normalizes over the two models") {
  const auto [d, spec] = generate_dataset(20, 1, Scheme::kScheme1, ErrorDist::kNormal, 4);
  const auto result = enumerate_all(d, PriorSpec::parse("sics-nu1"), ModelPrior::uniform());
  CHECK(result.visited == 2);
  const double sum =
      result.probs.at(ModelIndex::null_model()) + result.probs.at(ModelIndex({1}));
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumerate_all refuses oversized spaces") {
  const auto [d, spec] = generate_dataset(40, 8, Scheme::kTable1, ErrorDist::kNormal, 4);
  SearchOptions opt;
  opt.max_p_exhaustive = 6;
  CHECK_THROWS_AS(enumerate_all(d, PriorSpec::parse("sics-nu1"), ModelPrior::uniform(), opt),
                  SpaceTooLarge);
}

TEST_CASE("null-true exhaustive posterior matches the independent naive evaluation") {
  const auto [d, spec] = generate_dataset(60, 8, Scheme::kScheme1, ErrorDist::kNormal, 11);
  const PriorSpec prior = PriorSpec::parse("sics-nup");
  const auto result = enumerate_all(d, prior, ModelPrior::uniform());
  const auto naive = naive_posterior(d, prior, ModelPrior::uniform());
  CHECK(result.probs.at(ModelIndex::null_model()) ==
        doctest::Approx(naive.at(ModelIndex::null_model())).epsilon(1e-6));
  CHECK(total_variation(result.probs, naive) < 1e-6);
}

TEST_CASE("restricting the exhaustive posterior to the nested chain matches enumerate_nested") {
  const auto [d, spec] = generate_dataset(40, 5, Scheme::kTable1, ErrorDist::kNormal, 21);
  const PriorSpec prior = PriorSpec::parse("sics-nu1");
  const auto exhaustive = enumerate_all(d, prior, ModelPrior::uniform());
  const auto nested = enumerate_nested(d, prior, ModelPrior::uniform());
  CHECK(nested.probs.size() == 6);

  double nested_mass = 0.0;
  std::uint64_t mask = 0;
  std::vector<std::pair<ModelIndex, double>> restricted;
  restricted.emplace_back(ModelIndex::null_model(), exhaustive.probs.at(ModelIndex::null_model()));
  for (int j = 1; j <= 5; ++j) {
    mask |= std::uint64_t{1} << (j - 1);
    restricted.emplace_back(ModelIndex::from_mask(mask),
                            exhaustive.probs.at(ModelIndex::from_mask(mask)));
  }
  for (const auto& [model, prob] : restricted) nested_mass += prob;
  for (const auto& [model, prob] : restricted)
    CHECK(nested.probs.at(model) == doctest::Approx(prob / nested_mass).epsilon(1e-9));
}

TEST_CASE("strong nested signal recovers the prefix model") {
  const TruthParams truth = make_truth(6, Scheme::kNested, 5);
  const auto [d, spec] =
      realize_dataset(truth, 300, ErrorDist::kNormal, ErrorCalibration::kDefault, 9);
  const auto result = enumerate_nested(d, PriorSpec::parse("sics-nup"), ModelPrior::uniform());
  CHECK(result.top == truth.true_model);
}

TEST_CASE("independent response sends the nested top to the null model") {
  int null_wins = 0;
  const int reps = 30;
  for (int rep = 0; rep < reps; ++rep) {
    const auto [d, spec] =
        generate_dataset(200, 6, Scheme::kScheme1, ErrorDist::kNormal, 100 + rep);
    const auto result = enumerate_nested(d, PriorSpec::parse("sics-nup"), ModelPrior::uniform());
    if (result.top == ModelIndex::null_model()) ++null_wins;
  }
  CHECK(null_wins > reps / 2);
}

TEST_CASE("gibbs: minimal chain stays normalized") {
  const auto [d, spec] = generate_dataset(20, 1, Scheme::kScheme1, ErrorDist::kNormal, 8);
  const auto result =
      gibbs_search(d, PriorSpec::parse("sics-nu1"), ModelPrior::uniform(), {2, 1, 7, 1e-10});
  CHECK(result.probs.size() <= 2);
  double sum = 0.0;
  for (const auto& [model, prob] : result.probs) sum += prob;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("gibbs is deterministic in the seed and stable across seeds on strong signal") {
  const TruthParams truth = make_truth(10, Scheme::kTable1, 3);
  const auto [d, spec] =
      realize_dataset(truth, 250, ErrorDist::kNormal, ErrorCalibration::kDefault, 10);
  const PriorSpec prior = PriorSpec::parse("sics-nup");
  const GibbsOptions opt{2000, 1000, 42, 1e-10};
  const auto a = gibbs_search(d, prior, ModelPrior::uniform(), opt);
  const auto b = gibbs_search(d, prior, ModelPrior::uniform(), opt);
  CHECK(a.probs == b.probs);
  CHECK(a.top == b.top);
  CHECK(a.visited == b.visited);

  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto c = gibbs_search(d, prior, ModelPrior::uniform(), {2000, 1000, seed, 1e-10});
    CHECK(c.top == a.top);
  }
}

TEST_CASE("gibbs posterior is close to enumeration on a well-separated instance") {
  const TruthParams truth = make_truth(8, Scheme::kTable1, 17);
  const auto [d, spec] =
      realize_dataset(truth, 150, ErrorDist::kNormal, ErrorCalibration::kDefault, 23);
  const PriorSpec prior = PriorSpec::parse("sics-nup");
  const auto exact = enumerate_all(d, prior, ModelPrior::uniform());
  const auto chain = gibbs_search(d, prior, ModelPrior::uniform(), {4000, 2000, 5, 1e-10});
  CHECK(total_variation(exact.probs, chain.probs) < 0.02);
  CHECK(chain.top == exact.top);
}

TEST_CASE("renormalizing over the visited subset can only inflate probabilities") {
  const TruthParams truth = make_truth(10, Scheme::kTable1, 29);
  const auto [d, spec] =
      realize_dataset(truth, 80, ErrorDist::kNormal, ErrorCalibration::kDefault, 31);
  const PriorSpec prior = PriorSpec::parse("sics-nu1");
  const auto exact = enumerate_all(d, prior, ModelPrior::uniform());
  const auto chain = gibbs_search(d, prior, ModelPrior::uniform(), {3000, 1500, 11, 1e-10});
  for (const auto& [model, prob] : chain.probs)
    CHECK(prob >= exact.probs.at(model) * (1.0 - 1e-9));
}

TEST_CASE("visit frequencies track exact posteriors (rank correlation)") {
  const TruthParams truth = make_truth(8, Scheme::kTable1, 41);
  const auto [d, spec] =
      realize_dataset(truth, 120, ErrorDist::kNormal, ErrorCalibration::kDefault, 43);
  const PriorSpec prior = PriorSpec::parse("sics-nup");
  const auto exact = enumerate_all(d, prior, ModelPrior::uniform());
  const auto chain = gibbs_search(d, prior, ModelPrior::uniform(), {10000, 5000, 13, 1e-10});

  // Spearman correlation over models visited at least 5 times.
  std::vector<std::pair<double, double>> pairs;
  for (const auto& [model, count] : chain.visit_counts)
    if (count >= 5) pairs.emplace_back(static_cast<double>(count), exact.probs.at(model));
  REQUIRE(pairs.size() >= 5);
  const auto rank = [](std::vector<double> v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) r[order[i]] = static_cast<double>(i);
    return r;
  };
  std::vector<double> xs, ys;
  for (const auto& [x, y] : pairs) {
    xs.push_back(x);
    ys.push_back(y);
  }
  const auto rx = rank(xs);
  const auto ry = rank(ys);
  double sxy = 0, sxx = 0, syy = 0;
  const double mean = (static_cast<double>(rx.size()) - 1.0) / 2.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  CHECK(sxy / std::sqrt(sxx * syy) > 0.9);
}

TEST_CASE("marginals are computed at most once per search") {
  const auto [d, spec] = generate_dataset(50, 6, Scheme::kTable1, ErrorDist::kNormal, 3);
  const PriorSpec prior = PriorSpec::parse("sics-nup");
  ModelScorer scorer(d, prior, ModelPrior::uniform(), 1e-10);
  const double first = scorer.log_score(0b101);
  const long distinct_after_first = scorer.distinct();
  const double second = scorer.log_score(0b101);
  CHECK(first == second);  // bit-exact cache hit
  CHECK(scorer.distinct() == distinct_after_first);
  CHECK(scorer.hits() == 1);
}

TEST_CASE("the top-model order is total, so evaluation order cannot change the argmax") {
  // Exact ties resolve to the smaller model, then lexicographically.
  CHECK(ranks_above(1.0, ModelIndex({1}), 0.5, ModelIndex({2})));
  CHECK(ranks_above(1.0, ModelIndex({1}), 1.0, ModelIndex({1, 2})));
  CHECK(ranks_above(1.0, ModelIndex({1, 3}), 1.0, ModelIndex({2, 3})));
  CHECK_FALSE(ranks_above(1.0, ModelIndex({2, 3}), 1.0, ModelIndex({1, 3})));
  CHECK_FALSE(ranks_above(1.0, ModelIndex({1}), 1.0, ModelIndex({1})));

  // Scanning any permutation of a tied list yields the same winner.
  std::vector<std::pair<ModelIndex, double>> scored = {
      {ModelIndex({2}), 1.0}, {ModelIndex({1, 2}), 1.0},  {ModelIndex({1}), 1.0},
      {ModelIndex({3}), 0.2}, {ModelIndex::null_model(), 0.5},
  };
  Xoshiro256pp rng(15);
  for (int rep = 0; rep < 10; ++rep) {
    rng.shuffle(scored);
    ModelIndex best = scored.front().first;
    double best_score = scored.front().second;
    for (const auto& [model, score] : scored)
      if (ranks_above(score, model, best_score, best)) {
        best = model;
        best_score = score;
      }
    CHECK(best == ModelIndex({1}));
  }
}

TEST_CASE("search results relabel consistently under column permutation") {
  const TruthParams truth = make_truth(6, Scheme::kTable1, 61);
  const auto [d, spec] =
      realize_dataset(truth, 120, ErrorDist::kNormal, ErrorCalibration::kDefault, 62);
  const PriorSpec prior = PriorSpec::parse("sics-nup");
  const auto base = enumerate_all(d, prior, ModelPrior::uniform());

  Eigen::MatrixXd x = d.x();
  x.col(0).swap(x.col(5));  // swap regressors 1 and 6
  const Dataset swapped(d.y(), x);
  const auto relabeled = enumerate_all(swapped, prior, ModelPrior::uniform());

  const auto relabel = [](const ModelIndex& m) {
    std::vector<int> idx;
    for (int j : m.indices()) idx.push_back(j == 1 ? 6 : (j == 6 ? 1 : j));
    return ModelIndex(idx);
  };
  CHECK(relabeled.top == relabel(base.top));
  for (const auto& [model, prob] : base.probs)
    CHECK(relabeled.probs.at(relabel(model)) == doctest::Approx(prob).epsilon(1e-9));
}

TEST_CASE("gibbs validates its options") {
  const auto [d, spec] = generate_dataset(20, 2, Scheme::kTable1, ErrorDist::kNormal, 2);
  CHECK_THROWS_AS(
      gibbs_search(d, PriorSpec::parse("sics-nu1"), ModelPrior::uniform(), {100, 100, 1, 1e-10}),
      InvalidInput);
}
