#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "rng.hpp"
#include "support/quadrature.hpp"
#include "support/stats.hpp"
#include "weights.hpp"

using namespace oasmix;
using testsupport::chi2_gof_pvalue;
using testsupport::ks_test_pvalue;
using testsupport::ks_two_sample_pvalue;
using testsupport::simpson;

namespace {
double beta_pdf(double x, double a, double b) {
  return std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log(1.0 - x) +
                  std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b));
}
double beta_cdf(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // Substitute t = u^4 so densities with a < 1 stay integrable at the origin.
  return simpson([&](double u) { return beta_pdf(u * u * u * u, a, b) * 4.0 * u * u * u; },
                 0.0, std::pow(x, 0.25), 4000);
}
std::string alpha_key(const std::vector<int>& a) {
  std::string s;
  for (int v : a) s += std::to_string(v) + ",";
  return s;
}
}  // namespace

TEST_CASE("prior validation") {
  CHECK_NOTHROW(MixingPrior::dp(1.0).validate());
  CHECK_NOTHROW(MixingPrior::py(0.5, 0.5).validate());
  CHECK_NOTHROW(MixingPrior::esb(1.0, 1.0).validate());
  CHECK_NOTHROW(MixingPrior::gp(1.0, 1.0).validate());
  CHECK_THROWS(MixingPrior::dp(0.0).validate());
  CHECK_THROWS(MixingPrior::py(1.0, 0.5).validate());
  CHECK_THROWS(MixingPrior::py(-0.1, 0.5).validate());
  CHECK_THROWS(MixingPrior::py(0.5, -0.5).validate());
  CHECK_THROWS(MixingPrior::esb(0.0, 1.0).validate());
  CHECK_THROWS(MixingPrior::gp(1.0, -1.0).validate());
  CHECK(MixingPrior::dp(2.0).size_biased());
  CHECK(MixingPrior::py(0.5, 0.5).size_biased());
  CHECK_FALSE(MixingPrior::esb(1.0, 1.0).size_biased());
  CHECK_FALSE(MixingPrior::gp(1.0, 1.0).size_biased());
}

TEST_CASE("stick-breaking map") {
  StickWeights sw = sticks_to_weights({0.5, 0.5});
  REQUIRE(sw.p.size() == 2);
  CHECK(sw.p[0] == doctest::Approx(0.5));
  CHECK(sw.p[1] == doctest::Approx(0.25));
  CHECK(sw.tail == doctest::Approx(0.25));
  CHECK_THROWS(sticks_to_weights({0.5, 1.5}));
}

TEST_CASE("stick posterior parameters: worked examples") {
  // DP(1), block sizes (3,2): Be(3,3) and Be(2,1).
  auto dp = stick_posterior_params(MixingPrior::dp(1.0), {3, 2});
  REQUIRE(dp.size() == 2);
  CHECK(dp[0].first == doctest::Approx(3.0));
  CHECK(dp[0].second == doctest::Approx(3.0));
  CHECK(dp[1].first == doctest::Approx(2.0));
  CHECK(dp[1].second == doctest::Approx(1.0));
  // PY(sigma=0.5, beta=0.5): Be(n_j - sigma, sum_{l>j} n_l + beta + j*sigma).
  auto py = stick_posterior_params(MixingPrior::py(0.5, 0.5), {3, 2});
  CHECK(py[0].first == doctest::Approx(2.5));
  CHECK(py[0].second == doctest::Approx(3.0));
  CHECK(py[1].first == doctest::Approx(1.5));
  CHECK(py[1].second == doctest::Approx(1.5));
  // Prior parameters are the zero-count case.
  auto pr = stick_prior_params(MixingPrior::py(0.5, 0.5), 2);
  CHECK(pr[0].first == doctest::Approx(0.5));
  CHECK(pr[0].second == doctest::Approx(1.0));
  CHECK(pr[1].first == doctest::Approx(0.5));
  CHECK(pr[1].second == doctest::Approx(1.5));
}

TEST_CASE("posterior stick sampler matches its marginal laws") {
  MixingPrior prior = MixingPrior::dp(1.0);
  Rng rng(404);
  std::vector<double> v1, v2;
  for (int i = 0; i < 20000; ++i) {
    StickWeights sw = sample_sticks_posterior(prior, {3, 2}, rng);
    REQUIRE(sw.v.size() == 2);
    v1.push_back(sw.v[0]);
    v2.push_back(sw.v[1]);
    CHECK(sw.p[0] == doctest::Approx(sw.v[0]));
    CHECK(sw.p[1] == doctest::Approx(sw.v[1] * (1.0 - sw.v[0])));
  }
  CHECK(ks_test_pvalue(v1, [](double x) { return beta_cdf(x, 3.0, 3.0); }) > 1e-3);
  CHECK(ks_test_pvalue(v2, [](double x) { return beta_cdf(x, 2.0, 1.0); }) > 1e-3);
}

TEST_CASE("size-biased pairs under DP(1): second normalized weight replays the first's law") {
  // Under DP(1), p2/(1-p1) is independent of p1 and distributed like p1.
  MixingPrior prior = MixingPrior::dp(1.0);
  Rng rng(711);
  std::vector<double> first, ratio;
  for (int i = 0; i < 20000; ++i) {
    StickWeights sw = sample_sticks_prior(prior, 2, rng);
    first.push_back(sw.v[0]);
    ratio.push_back(sw.p[1] / (1.0 - sw.p[0]));
  }
  CHECK(ks_two_sample_pvalue(first, ratio) > 1e-3);
}

TEST_CASE("new size-biased weight: law and bitwise permutation invariance") {
  MixingPrior prior = MixingPrior::dp(1.0);
  std::vector<double> pblock = {0.31, 0.07, 0.22};
  const double rest = 1.0 - (0.31 + 0.07 + 0.22);
  Rng r1(99), r2(99);
  std::vector<double> perm = {0.22, 0.31, 0.07};
  for (int i = 0; i < 2000; ++i) {
    const double a = discover_new_weight_sb(prior, pblock, r1);
    const double b = discover_new_weight_sb(prior, perm, r2);
    CHECK(a == b);  // bitwise: summation order is canonicalized
    CHECK(a > 0.0);
    CHECK(a < rest);
  }
  // Law: new weight / remaining mass ~ Be(1 - sigma, beta + (k+1) sigma).
  MixingPrior py = MixingPrior::py(0.25, 0.75);
  Rng r3(1234);
  std::vector<double> scaled;
  for (int i = 0; i < 20000; ++i)
    scaled.push_back(discover_new_weight_sb(py, pblock, r3) / rest);
  CHECK(ks_test_pvalue(scaled, [](double x) { return beta_cdf(x, 0.75, 1.75); }) > 1e-3);
}

TEST_CASE("stick weight density: hand value and dimension checks") {
  // Independent sticks Be(3,3), Be(2,1) evaluated at block weights (0.4, 0.3):
  // v = (0.4, 0.5), density = Be(0.4;3,3) * Be(0.5;2,1) / (1-0.4) = 2.88.
  std::vector<std::pair<double, double>> params = {{3.0, 3.0}, {2.0, 1.0}};
  CHECK(log_stick_weight_density({0.4, 0.3}, params) ==
        doctest::Approx(std::log(2.88)).epsilon(1e-10));
  CHECK_THROWS(log_stick_weight_density({0.4}, params));
  CHECK(std::isfinite(log_stick_weight_density({0.5, 0.5 - 1e-12}, params)));
}

TEST_CASE("general path: prefix construction and invariants") {
  MixingPrior gp = MixingPrior::gp(1.0, 1.0);
  Rng rng(5150);
  GeneralWeights w = init_general_prior(gp, rng);
  REQUIRE(w.alpha == std::vector<int>{1});
  REQUIRE(w.L() >= 1);
  // Geometric invariant: p_j / p_{j+1} = 1 / (1 - lambda), exactly.
  for (int i = 0; i < 50; ++i) extend_prefix(w, gp, rng);
  for (int j = 0; j + 1 < w.L(); ++j)
    CHECK(w.p[j] / w.p[j + 1] == doctest::Approx(1.0 / (1.0 - w.lambda)).epsilon(1e-12));

  MixingPrior esb = MixingPrior::esb(2.0, 3.0);
  GeneralWeights we = init_general_prior(esb, rng);
  for (int i = 0; i < 50; ++i) extend_prefix(we, esb, rng);
  CHECK(static_cast<int>(we.sticks.size()) == we.L());
  double acc = 0.0;
  for (int j = 0; j < we.L(); ++j) {
    CHECK(we.p[j] == doctest::Approx(we.sticks[j] * (1.0 - acc)));
    acc += we.p[j];
    CHECK(acc < 1.0);
  }
  we.alpha = {3, 1};
  prune_prefix(we);
  CHECK(we.L() == 3);
  CHECK(static_cast<int>(we.sticks.size()) == 3);
}

TEST_CASE("discover_new_alpha walks unoccupied weights in order") {
  // Prefix (0.5, 0.25) with alpha = {1}: the next pick is 2 with probability
  // 0.25/0.5, 3 with 0.125/0.5 on average, and beyond otherwise.
  MixingPrior esb = MixingPrior::esb(1.0, 1.0);
  Rng rng(8080);
  std::vector<long> hits(3, 0);  // categories: pick 2, pick 3, pick >= 4
  const int reps = 60000;
  for (int i = 0; i < reps; ++i) {
    GeneralWeights w;
    w.sticks = {0.5, 0.5};
    w.p = {0.5, 0.25};
    w.alpha = {1};
    const int pick = discover_new_alpha(w, esb, rng);
    CHECK(pick >= 2);
    CHECK(pick <= w.L());
    CHECK(w.alpha.back() == pick);
    if (pick == 2)
      ++hits[0];
    else if (pick == 3)
      ++hits[1];
    else
      ++hits[2];
  }
  CHECK(chi2_gof_pvalue(hits, {0.5, 0.25, 0.25}) > 1e-3);
}

TEST_CASE("alpha permutation law: enumerated two-block example") {
  // Prefix weights (0.7, 0.3), alpha = (1,2), block sizes (1,2):
  // pi(identity) = 0.7*0.3^2 = 0.063, pi(swap) = 0.3*0.7^2 = 0.147,
  // normalized (0.3, 0.7).
  GeneralWeights w;
  w.sticks = {0.7, 0.3 / (1.0 - 0.7)};
  w.p = {0.7, 0.3};
  w.alpha = {1, 2};
  Rng rng(2024);
  std::map<std::string, long> hits;
  const int reps = 100000;
  for (int i = 0; i < reps; ++i) {
    GeneralWeights t = w;
    sample_alpha_block(t, {1, 2}, AlphaMode::kEnumerate, 0, rng);
    ++hits[alpha_key(t.alpha)];
  }
  REQUIRE(hits.size() == 2);
  std::vector<long> obs = {hits["1,2,"], hits["2,1,"]};
  CHECK(chi2_gof_pvalue(obs, {0.3, 0.7}) > 1e-3);
}

TEST_CASE("locally balanced permutation walk matches the enumerated law") {
  GeneralWeights w;
  w.lambda = 0.45;
  w.p = {0.45, 0.2475, 0.136125, 0.07486875};
  w.alpha = {1, 2, 3, 4};
  std::vector<int> counts = {4, 3, 2, 1};

  // Exact law over the 24 relabelings, via the enumerate mode itself checked
  // against a direct hand computation of the normalizing sum.
  std::map<std::string, double> exact;
  {
    std::vector<int> idx = {0, 1, 2, 3};
    double z = 0.0;
    std::vector<std::pair<std::string, double>> terms;
    std::sort(idx.begin(), idx.end());
    do {
      double logpi = 0.0;
      std::vector<int> a(4);
      for (int j = 0; j < 4; ++j) {
        a[j] = w.alpha[idx[j]];
        logpi += counts[j] * std::log(w.p[a[j] - 1]);
      }
      terms.push_back({alpha_key(a), std::exp(logpi)});
      z += terms.back().second;
    } while (std::next_permutation(idx.begin(), idx.end()));
    for (auto& [key, val] : terms) exact[key] += val / z;
  }

  Rng rng(31337);
  std::map<std::string, long> hits;
  const int steps = 100000;
  GeneralWeights t = w;
  for (int i = 0; i < steps; ++i) {
    sample_alpha_block(t, counts, AlphaMode::kLocallyBalanced, 1, rng);
    ++hits[alpha_key(t.alpha)];
  }
  double tv = 0.0;
  for (const auto& [key, prob] : exact) {
    const double emp = hits.count(key) ? hits[key] / static_cast<double>(steps) : 0.0;
    tv += std::abs(prob - emp);
  }
  CHECK(tv / 2.0 < 0.02);

  // Enumerate mode refuses oversized blocks.
  GeneralWeights big;
  big.lambda = 0.3;
  big.p.resize(8);
  double cum = 1.0;
  for (int j = 0; j < 8; ++j) {
    big.p[j] = 0.3 * cum;
    cum *= 0.7;
  }
  big.alpha = {1, 2, 3, 4, 5, 6, 7, 8};
  CHECK_THROWS(sample_alpha_block(big, std::vector<int>(8, 1), AlphaMode::kEnumerate, 0, rng));
}

TEST_CASE("alpha exponents and posterior weight laws: worked examples") {
  // ESB with exponents r = (2,0,1) and a=b=1: sticks Be(3,2), Be(1,2), Be(2,1).
  GeneralWeights w;
  w.sticks = {0.3, 0.4, 0.5};
  w.p = {0.3, 0.28, 0.21};
  w.alpha = {1, 3};
  auto r = alpha_exponents(w, {2, 1});
  CHECK(r == std::vector<long>{2, 0, 1});
  auto params = esb_stick_posterior_params(MixingPrior::esb(1.0, 1.0), r);
  REQUIRE(params.size() == 3);
  CHECK(params[0].first == doctest::Approx(3.0));
  CHECK(params[0].second == doctest::Approx(2.0));
  CHECK(params[1].first == doctest::Approx(1.0));
  CHECK(params[1].second == doctest::Approx(2.0));
  CHECK(params[2].first == doctest::Approx(2.0));
  CHECK(params[2].second == doctest::Approx(1.0));

  // GP with r = (3,2) and Be(1,1) prior: lambda | r ~ Be(6,3).
  auto lp = gp_lambda_posterior_params(MixingPrior::gp(1.0, 1.0), {3, 2});
  CHECK(lp.first == doctest::Approx(6.0));
  CHECK(lp.second == doctest::Approx(3.0));
}

TEST_CASE("posterior weight sampler keeps structure and matches the GP law") {
  MixingPrior gp = MixingPrior::gp(1.0, 1.0);
  Rng rng(6021);
  std::vector<double> lambdas;
  for (int i = 0; i < 20000; ++i) {
    GeneralWeights w;
    w.lambda = 0.5;
    w.p = {0.5, 0.25};
    w.alpha = {1, 2};
    sample_weights_posterior_general(w, gp, {3, 2}, rng);
    lambdas.push_back(w.lambda);
    REQUIRE(w.L() == 2);
    CHECK(w.p[0] == doctest::Approx(w.lambda));
    CHECK(w.p[1] == doctest::Approx(w.lambda * (1.0 - w.lambda)));
  }
  CHECK(ks_test_pvalue(lambdas, [](double x) { return beta_cdf(x, 6.0, 3.0); }) > 1e-3);
}

TEST_CASE("alpha Gibbs cycle with acceleration matches the exact marginal") {
  // Under ESB with iid Be(a,b) sticks, the marginal law of the picks given
  // block sizes is available in closed form:
  //   pi(alpha) proportional to prod_l B(a + r_l, b + s_l) / B(a, b)
  // with r_l the exponent of weight l and s_l the sum of exponents beyond l.
  // The cycle [permute picks, acceleration, stick posterior] is invariant for
  // the joint law and, thanks to the acceleration pass, ergodic over picks,
  // so its long-run pick frequencies must match the closed form.
  MixingPrior esb = MixingPrior::esb(1.5, 1.0);
  std::vector<int> counts = {3, 1};
  const double logB = std::lgamma(1.5) + std::lgamma(1.0) - std::lgamma(2.5);

  auto exact_weight = [&](int a1, int a2) {
    const int top = std::max(a1, a2);
    double acc = 0.0;
    long suffix = 0;
    for (int l = top; l >= 1; --l) {
      const long r = (a1 == l) ? counts[0] : (a2 == l) ? counts[1] : 0;
      acc += std::lgamma(1.5 + r) + std::lgamma(1.0 + suffix) - std::lgamma(2.5 + r + suffix) - logB;
      suffix += r;
    }
    return std::exp(acc);
  };
  std::map<std::string, double> exact;
  double z = 0.0;
  for (int a1 = 1; a1 <= 40; ++a1) {
    for (int a2 = 1; a2 <= 40; ++a2) {
      if (a1 == a2) continue;
      const double wgt = exact_weight(a1, a2);
      z += wgt;
      std::string key = (a1 <= 3 && a2 <= 3) ? alpha_key({a1, a2}) : "deep";
      exact[key] += wgt;
    }
  }
  for (auto& [key, val] : exact) val /= z;

  Rng rng(11);
  GeneralWeights w = init_general_prior(esb, rng);
  discover_new_alpha(w, esb, rng);
  std::map<std::string, long> hits;
  const int iters = 60000;
  for (int i = 0; i < iters; ++i) {
    sample_alpha_block(w, counts, AlphaMode::kEnumerate, 0, rng);
    alpha_acceleration(w, esb, counts, rng);
    sample_weights_posterior_general(w, esb, counts, rng);
    prune_prefix(w);
    std::string key = (w.alpha[0] <= 3 && w.alpha[1] <= 3) ? alpha_key(w.alpha) : "deep";
    ++hits[key];
  }
  std::vector<long> obs;
  std::vector<double> probs;
  for (const auto& [key, prob] : exact) {
    obs.push_back(hits.count(key) ? hits[key] : 0);
    probs.push_back(prob);
  }
  CHECK(chi2_gof_pvalue(obs, probs) > 1e-3);
}

TEST_CASE("acceleration keeps alpha entries distinct and within the prefix") {
  MixingPrior gp = MixingPrior::gp(2.0, 2.0);
  Rng rng(2718);
  GeneralWeights w = init_general_prior(gp, rng);
  discover_new_alpha(w, gp, rng);
  discover_new_alpha(w, gp, rng);
  std::vector<int> counts = {5, 2, 1};
  for (int i = 0; i < 2000; ++i) {
    alpha_acceleration(w, gp, counts, rng);
    CHECK(w.alpha.size() == 3);
    std::vector<int> s = w.alpha;
    std::sort(s.begin(), s.end());
    CHECK(s[0] >= 1);
    CHECK(s[0] != s[1]);
    CHECK(s[1] != s[2]);
    CHECK(s[2] <= w.L());
  }
}

TEST_CASE("alpha sequence density: sequential size-biased factors") {
  GeneralWeights w;
  w.lambda = 0.5;
  w.p = {0.5, 0.25};
  w.alpha = {1, 2};
  // Sequence (1,2): 0.5 * (0.25 / (1-0.5)) = 0.25.
  CHECK(log_alpha_sequence_density(w, {1, 2}) == doctest::Approx(std::log(0.25)).epsilon(1e-12));
  // Sequence (2,1): 0.25 * (0.5 / 0.75).
  CHECK(log_alpha_sequence_density(w, {2, 1}) ==
        doctest::Approx(std::log(0.25 * 0.5 / 0.75)).epsilon(1e-12));
}
