#include "weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oasmix {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double sorted_sum(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  double s = 0.0;
  for (double v : x) s += v;
  return s;
}
}  // namespace

void MixingPrior::validate() const {
  switch (kind) {
    case PriorKind::kDP:
      if (!(beta > 0.0)) throw std::invalid_argument("DP prior: beta must be positive");
      if (sigma != 0.0) throw std::invalid_argument("DP prior: sigma must be zero");
      break;
    case PriorKind::kPY:
      if (!(sigma >= 0.0) || !(sigma < 1.0))
        throw std::invalid_argument("PY prior: sigma must lie in [0,1)");
      if (!(beta > -sigma)) throw std::invalid_argument("PY prior: beta must exceed -sigma");
      break;
    case PriorKind::kESB:
    case PriorKind::kGP:
      if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("ESB/GP prior: a and b must be positive");
      break;
  }
}

std::string MixingPrior::name() const {
  switch (kind) {
    case PriorKind::kDP: return "dp";
    case PriorKind::kPY: return "py";
    case PriorKind::kESB: return "esb";
    case PriorKind::kGP: return "gp";
  }
  return "?";
}

MixingPrior MixingPrior::dp(double beta) {
  MixingPrior p;
  p.kind = PriorKind::kDP;
  p.beta = beta;
  p.sigma = 0.0;
  return p;
}

MixingPrior MixingPrior::py(double sigma, double beta) {
  MixingPrior p;
  p.kind = PriorKind::kPY;
  p.sigma = sigma;
  p.beta = beta;
  return p;
}

MixingPrior MixingPrior::esb(double a, double b) {
  MixingPrior p;
  p.kind = PriorKind::kESB;
  p.a = a;
  p.b = b;
  return p;
}

MixingPrior MixingPrior::gp(double a, double b) {
  MixingPrior p;
  p.kind = PriorKind::kGP;
  p.a = a;
  p.b = b;
  return p;
}

double log_beta_pdf(double x, double a, double b) {
  if (!(x > 0.0) || !(x < 1.0)) return kNegInf;
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) + std::lgamma(a + b) -
         std::lgamma(a) - std::lgamma(b);
}

StickWeights sticks_to_weights(const std::vector<double>& v) {
  StickWeights out;
  out.v = v;
  out.p.resize(v.size());
  double rem = 1.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!(v[j] > 0.0) || !(v[j] < 1.0))
      throw std::invalid_argument("sticks_to_weights: sticks must lie in (0,1)");
    out.p[j] = v[j] * rem;
    rem *= 1.0 - v[j];
  }
  out.tail = rem;
  return out;
}

std::vector<std::pair<double, double>> stick_posterior_params(const MixingPrior& prior,
                                                              const std::vector<int>& counts) {
  prior.validate();
  if (!prior.size_biased())
    throw std::invalid_argument("stick_posterior_params: requires a DP or PY prior");
  const int k = static_cast<int>(counts.size());
  std::vector<std::pair<double, double>> params(k);
  double suffix = 0.0;
  for (int j = k - 1; j >= 0; --j) {
    if (counts[j] < 1) throw std::invalid_argument("stick_posterior_params: empty block");
    params[j] = {counts[j] - prior.sigma, suffix + prior.beta + (j + 1) * prior.sigma};
    suffix += counts[j];
  }
  return params;
}

std::vector<std::pair<double, double>> stick_prior_params(const MixingPrior& prior, int k) {
  prior.validate();
  if (!prior.size_biased())
    throw std::invalid_argument("stick_prior_params: requires a DP or PY prior");
  std::vector<std::pair<double, double>> params(k);
  for (int j = 0; j < k; ++j)
    params[j] = {1.0 - prior.sigma, prior.beta + (j + 1) * prior.sigma};
  return params;
}

namespace {
StickWeights sample_from_params(const std::vector<std::pair<double, double>>& params, Rng& rng) {
  std::vector<double> v(params.size());
  for (std::size_t j = 0; j < params.size(); ++j) v[j] = rng.beta(params[j].first, params[j].second);
  return sticks_to_weights(v);
}
}  // namespace

StickWeights sample_sticks_prior(const MixingPrior& prior, int k, Rng& rng) {
  return sample_from_params(stick_prior_params(prior, k), rng);
}

StickWeights sample_sticks_posterior(const MixingPrior& prior, const std::vector<int>& counts,
                                     Rng& rng) {
  return sample_from_params(stick_posterior_params(prior, counts), rng);
}

double discover_new_weight_sb(const MixingPrior& prior, const std::vector<double>& pblock,
                              Rng& rng) {
  prior.validate();
  if (!prior.size_biased())
    throw std::invalid_argument("discover_new_weight_sb: requires a DP or PY prior");
  const int k = static_cast<int>(pblock.size());
  double rest = 1.0 - sorted_sum(pblock);
  if (rest < 0.0) rest = 0.0;
  const double v = rng.beta(1.0 - prior.sigma, prior.beta + (k + 1) * prior.sigma);
  double w = v * rest;
  return w > 0.0 ? w : 1e-300;
}

double log_stick_weight_density(const std::vector<double>& p,
                                const std::vector<std::pair<double, double>>& params) {
  if (p.size() != params.size())
    throw std::invalid_argument("log_stick_weight_density: dimension mismatch");
  double rem = 1.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!(rem > 0.0)) return kNegInf;
    const double v = p[j] / rem;
    if (!(v > 0.0) || !(v < 1.0)) return kNegInf;
    acc += log_beta_pdf(v, params[j].first, params[j].second) - std::log(rem);
    rem -= p[j];
  }
  return acc;
}

// --- General path ------------------------------------------------------------

double GeneralWeights::occupied() const {
  double s = 0.0;
  for (int aj : alpha) s += p[aj - 1];
  return s;
}

double GeneralWeights::prefix_sum() const {
  double s = 0.0;
  for (double w : p) s += w;
  return s;
}

void GeneralWeights::validate(const MixingPrior& prior) const {
  if (prior.size_biased())
    throw std::invalid_argument("GeneralWeights: prior must be ESB or GP");
  std::vector<int> seen;
  for (int aj : alpha) {
    if (aj < 1 || aj > L()) throw std::runtime_error("general weights: pick outside prefix");
    for (int s : seen)
      if (s == aj) throw std::runtime_error("general weights: duplicate pick");
    seen.push_back(aj);
  }
  if (prior.kind == PriorKind::kESB) {
    if (static_cast<int>(sticks.size()) != L())
      throw std::runtime_error("general weights: stick count disagrees with prefix");
    double rem = 1.0;
    for (int j = 0; j < L(); ++j) {
      if (std::abs(p[j] - sticks[j] * rem) > 1e-12 * std::max(1.0, std::abs(p[j])))
        throw std::runtime_error("general weights: prefix out of sync with sticks");
      rem -= p[j];
    }
  } else {
    if (!(lambda > 0.0) || !(lambda < 1.0))
      throw std::runtime_error("general weights: lambda outside (0,1)");
    double expect = lambda;
    for (int j = 0; j < L(); ++j) {
      if (std::abs(p[j] - expect) > 1e-12 * std::max(1.0, expect))
        throw std::runtime_error("general weights: prefix is not geometric");
      expect *= 1.0 - lambda;
    }
  }
  if (prefix_sum() >= 1.0 + 1e-12) throw std::runtime_error("general weights: prefix mass exceeds one");
}

GeneralWeights init_general_prior(const MixingPrior& prior, Rng& rng) {
  prior.validate();
  if (prior.size_biased())
    throw std::invalid_argument("init_general_prior: prior must be ESB or GP");
  GeneralWeights w;
  if (prior.kind == PriorKind::kGP) w.lambda = rng.beta(prior.a, prior.b);
  extend_prefix(w, prior, rng);
  w.alpha = {1};
  return w;
}

void extend_prefix(GeneralWeights& w, const MixingPrior& prior, Rng& rng) {
  if (prior.kind == PriorKind::kESB) {
    const double v = rng.beta(prior.a, prior.b);
    const double rem = 1.0 - w.prefix_sum();
    w.sticks.push_back(v);
    double nw = v * (rem > 0.0 ? rem : 0.0);
    w.p.push_back(nw > 0.0 ? nw : 1e-300);
  } else {
    // Geometric: p_{j+1} = p_j * (1 - lambda), deterministic given lambda.
    const double nw = w.p.empty() ? w.lambda : w.p.back() * (1.0 - w.lambda);
    w.p.push_back(nw > 0.0 ? nw : 1e-300);
  }
}

void prune_prefix(GeneralWeights& w) {
  int keep = 0;
  for (int aj : w.alpha) keep = std::max(keep, aj);
  if (keep < 1) keep = 1;
  if (w.L() > keep) {
    w.p.resize(keep);
    if (!w.sticks.empty()) w.sticks.resize(keep);
  }
}

int sample_unoccupied_index(GeneralWeights& w, const MixingPrior& prior, Rng& rng) {
  std::vector<char> occ(w.L(), 0);
  for (int aj : w.alpha) occ[aj - 1] = 1;
  const double target = rng.uniform01() * (1.0 - w.occupied());
  double cum = 0.0;
  for (int l = 1; l <= 1000000; ++l) {
    if (l > w.L()) extend_prefix(w, prior, rng);
    if (l <= static_cast<int>(occ.size()) && occ[l - 1]) continue;
    cum += w.p[l - 1];
    if (target <= cum) return l;
  }
  throw std::runtime_error("sample_unoccupied_index: prefix walk failed to terminate");
}

int discover_new_alpha(GeneralWeights& w, const MixingPrior& prior, Rng& rng) {
  const int pick = sample_unoccupied_index(w, prior, rng);
  w.alpha.push_back(pick);
  return pick;
}

double log_alpha_sequence_density(const GeneralWeights& w, const std::vector<int>& seq) {
  double rem = 1.0;
  double acc = 0.0;
  std::vector<char> used(w.L(), 0);
  for (int aj : seq) {
    if (aj < 1 || aj > w.L())
      throw std::invalid_argument("log_alpha_sequence_density: pick outside prefix");
    if (used[aj - 1]) throw std::invalid_argument("log_alpha_sequence_density: repeated pick");
    used[aj - 1] = 1;
    if (!(rem > 0.0)) return kNegInf;
    acc += std::log(w.p[aj - 1]) - std::log(rem);
    rem -= w.p[aj - 1];
  }
  return acc;
}

namespace {
// log pi of an assignment alpha given block sizes.
double log_pi_alpha(const GeneralWeights& w, const std::vector<int>& alpha,
                    const std::vector<int>& counts) {
  double acc = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j)
    acc += counts[j] * std::log(w.p[alpha[j] - 1]);
  return acc;
}
}  // namespace

void sample_alpha_block(GeneralWeights& w, const std::vector<int>& counts, AlphaMode mode,
                        int steps, Rng& rng) {
  const int k = w.k();
  if (static_cast<int>(counts.size()) != k)
    throw std::invalid_argument("sample_alpha_block: counts size mismatch");
  if (k <= 1) return;

  if (mode == AlphaMode::kEnumerate) {
    if (k > 6) throw std::invalid_argument("sample_alpha_block: enumerate mode supports at most 6 blocks");
    std::vector<int> idx(k);
    for (int j = 0; j < k; ++j) idx[j] = j;
    std::vector<std::vector<int>> options;
    std::vector<double> logw;
    std::sort(idx.begin(), idx.end());
    do {
      std::vector<int> cand(k);
      for (int j = 0; j < k; ++j) cand[j] = w.alpha[idx[j]];
      logw.push_back(log_pi_alpha(w, cand, counts));
      options.push_back(std::move(cand));
    } while (std::next_permutation(idx.begin(), idx.end()));
    w.alpha = options[rng.categorical_log(logw)];
    return;
  }

  // Locally balanced walk on transpositions with balancing function sqrt.
  // The proposal weight of swapping blocks (i,j) is exp(0.5 * delta_ij) where
  // delta is the log-target change; acceptance is
  // min{1, sqrt(pi'/pi) * Z(alpha)/Z(alpha')} with Z the unnormalized sums.
  auto neighbor_logw = [&](const std::vector<int>& alpha, std::vector<std::pair<int, int>>& pairs,
                           std::vector<double>& lw) {
    pairs.clear();
    lw.clear();
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) {
        const double delta = (counts[i] - counts[j]) *
                             (std::log(w.p[alpha[j] - 1]) - std::log(w.p[alpha[i] - 1]));
        pairs.emplace_back(i, j);
        lw.push_back(0.5 * delta);
      }
    }
  };
  auto logsumexp = [](const std::vector<double>& v) {
    double m = v[0];
    for (double x : v) m = std::max(m, x);
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
  };

  std::vector<std::pair<int, int>> pairs, pairs2;
  std::vector<double> lw, lw2;
  std::vector<int> cur = w.alpha;
  for (int step = 0; step < steps; ++step) {
    neighbor_logw(cur, pairs, lw);
    const double logz = logsumexp(lw);
    const int pick = rng.categorical_log(lw);
    std::vector<int> prop = cur;
    std::swap(prop[pairs[pick].first], prop[pairs[pick].second]);
    neighbor_logw(prop, pairs2, lw2);
    const double logz2 = logsumexp(lw2);
    // With neighbor weights relative to each center, the sqrt(pi ratio)
    // cancels against the normalizers and the ratio reduces to Z/Z'.
    const double logratio = logz - logz2;
    if (logratio >= 0.0 || std::log(rng.uniform01()) < logratio) cur = prop;
  }
  w.alpha = cur;
}

void alpha_acceleration(GeneralWeights& w, const MixingPrior& prior,
                        const std::vector<int>& counts, Rng& rng) {
  const int k = w.k();
  if (static_cast<int>(counts.size()) != k)
    throw std::invalid_argument("alpha_acceleration: counts size mismatch");
  for (int j = 0; j < k; ++j) {
    const int cand = sample_unoccupied_index(w, prior, rng);
    const int curp = w.alpha[j];
    const double occ = w.occupied();
    const double pc = w.p[curp - 1];
    const double pn = w.p[cand - 1];
    // Odds of keeping the current pick versus switching to the candidate.
    const double log_keep = counts[j] * std::log(pc) + std::log(pn) - std::log1p(-occ);
    const double log_switch =
        counts[j] * std::log(pn) + std::log(pc) - std::log1p(-(occ - pc + pn));
    const double m = std::max(log_keep, log_switch);
    const double pswitch = std::exp(log_switch - m) /
                           (std::exp(log_keep - m) + std::exp(log_switch - m));
    if (rng.uniform01() < pswitch) w.alpha[j] = cand;
  }
  prune_prefix(w);
}

std::vector<long> alpha_exponents(const GeneralWeights& w, const std::vector<int>& counts) {
  if (counts.size() != w.alpha.size())
    throw std::invalid_argument("alpha_exponents: counts size mismatch");
  std::vector<long> r(w.L(), 0);
  for (std::size_t j = 0; j < w.alpha.size(); ++j) {
    if (w.alpha[j] < 1 || w.alpha[j] > w.L())
      throw std::invalid_argument("alpha_exponents: pick outside prefix");
    r[w.alpha[j] - 1] = counts[j];
  }
  return r;
}

std::vector<std::pair<double, double>> esb_stick_posterior_params(const MixingPrior& prior,
                                                                  const std::vector<long>& r) {
  if (prior.kind != PriorKind::kESB)
    throw std::invalid_argument("esb_stick_posterior_params: requires an ESB prior");
  std::vector<std::pair<double, double>> params(r.size());
  double suffix = 0.0;
  for (int l = static_cast<int>(r.size()) - 1; l >= 0; --l) {
    params[l] = {r[l] + prior.a, suffix + prior.b};
    suffix += static_cast<double>(r[l]);
  }
  return params;
}

std::pair<double, double> gp_lambda_posterior_params(const MixingPrior& prior,
                                                     const std::vector<long>& r) {
  if (prior.kind != PriorKind::kGP)
    throw std::invalid_argument("gp_lambda_posterior_params: requires a GP prior");
  double total = 0.0, shifted = 0.0;
  for (std::size_t l = 0; l < r.size(); ++l) {
    total += static_cast<double>(r[l]);
    shifted += static_cast<double>(l) * static_cast<double>(r[l]);
  }
  return {prior.a + total, prior.b + shifted};
}

void sample_weights_posterior_general(GeneralWeights& w, const MixingPrior& prior,
                                      const std::vector<int>& counts, Rng& rng) {
  const std::vector<long> r = alpha_exponents(w, counts);
  if (prior.kind == PriorKind::kESB) {
    const auto params = esb_stick_posterior_params(prior, r);
    double rem = 1.0;
    for (int l = 0; l < w.L(); ++l) {
      w.sticks[l] = rng.beta(params[l].first, params[l].second);
      double nw = w.sticks[l] * (rem > 0.0 ? rem : 0.0);
      w.p[l] = nw > 0.0 ? nw : 1e-300;
      rem -= w.p[l];
    }
  } else if (prior.kind == PriorKind::kGP) {
    const auto lp = gp_lambda_posterior_params(prior, r);
    w.lambda = rng.beta(lp.first, lp.second);
    double cur = w.lambda;
    for (int l = 0; l < w.L(); ++l) {
      w.p[l] = cur > 0.0 ? cur : 1e-300;
      cur *= 1.0 - w.lambda;
    }
  } else {
    throw std::invalid_argument("sample_weights_posterior_general: requires ESB or GP");
  }
}

double log_general_prefix_prior(const GeneralWeights& w, const MixingPrior& prior) {
  if (prior.kind == PriorKind::kESB) {
    std::vector<std::pair<double, double>> params(w.L(), {prior.a, prior.b});
    return log_stick_weight_density(w.p, params);
  }
  if (prior.kind == PriorKind::kGP) return log_beta_pdf(w.lambda, prior.a, prior.b);
  throw std::invalid_argument("log_general_prefix_prior: requires ESB or GP");
}

double log_general_prefix_posterior(const GeneralWeights& w, const MixingPrior& prior,
                                    const std::vector<long>& r) {
  if (static_cast<int>(r.size()) != w.L())
    throw std::invalid_argument("log_general_prefix_posterior: exponent length mismatch");
  if (prior.kind == PriorKind::kESB)
    return log_stick_weight_density(w.p, esb_stick_posterior_params(prior, r));
  if (prior.kind == PriorKind::kGP) {
    const auto lp = gp_lambda_posterior_params(prior, r);
    return log_beta_pdf(w.lambda, lp.first, lp.second);
  }
  throw std::invalid_argument("log_general_prefix_posterior: requires ESB or GP");
}

}  // namespace oasmix
