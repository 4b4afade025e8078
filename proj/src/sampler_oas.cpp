#include "sampler_oas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace oasmix {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void OasConfig::validate() const {
  base.validate();
  prior.validate();
  if (lb_steps < 1) throw std::invalid_argument("OasConfig: lb_steps must be >= 1");
  if (enum_threshold < 1) throw std::invalid_argument("OasConfig: enum_threshold must be >= 1");
}

double OasState::weight(int j) const {
  if (j < 1 || j > alloc.k()) throw std::out_of_range("OasState::weight: block out of range");
  return pblock.empty() ? gw.pblock(j - 1) : pblock[static_cast<std::size_t>(j - 1)];
}

void OasState::validate(const OasConfig& cfg) const {
  alloc.validate();
  const int n = alloc.n();
  const int k = alloc.k();
  if (static_cast<int>(comps.size()) != k)
    throw std::runtime_error("OasState: one component per block required");
  for (const GaussComponent& c : comps)
    if (!(c.tau > 0.0) || !std::isfinite(c.mu) || !std::isfinite(c.tau))
      throw std::runtime_error("OasState: invalid component");
  if (static_cast<int>(order.size()) != n)
    throw std::runtime_error("OasState: order length mismatch");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int idx : order) {
    if (idx < 0 || idx >= n || seen[static_cast<std::size_t>(idx)])
      throw std::runtime_error("OasState: order is not a permutation");
    seen[static_cast<std::size_t>(idx)] = 1;
  }
  if (cfg.prior.size_biased()) {
    if (!gw.alpha.empty()) throw std::runtime_error("OasState: unexpected general-path state");
    if (static_cast<int>(pblock.size()) != k)
      throw std::runtime_error("OasState: one weight per block required");
    double total = 0.0;
    for (double p : pblock) {
      if (!(p > 0.0) || !(p < 1.0)) throw std::runtime_error("OasState: block weight outside (0,1)");
      total += p;
    }
    if (!(total < 1.0)) throw std::runtime_error("OasState: block weights must sum below 1");
  } else {
    if (!pblock.empty()) throw std::runtime_error("OasState: unexpected size-biased state");
    gw.validate(cfg.prior);
    if (gw.k() != k) throw std::runtime_error("OasState: one pick per block required");
  }
}

std::vector<BlockStats> block_stats(const AllocationState& alloc, const std::vector<int>& order,
                                    const std::vector<double>& y) {
  std::vector<BlockStats> stats(static_cast<std::size_t>(alloc.k()));
  for (int pos = 0; pos < alloc.n(); ++pos)
    stats[static_cast<std::size_t>(alloc.d[static_cast<std::size_t>(pos)] - 1)].add(
        y[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])]);
  return stats;
}

std::vector<double> allocation_log_menu(const std::vector<double>& weights,
                                        const std::vector<double>& logfits, double tail,
                                        double log_new_fit) {
  if (weights.size() != logfits.size())
    throw std::invalid_argument("allocation_log_menu: weights/logfits length mismatch");
  std::vector<double> logw(weights.size() + 1);
  for (std::size_t j = 0; j < weights.size(); ++j) logw[j] = std::log(weights[j]) + logfits[j];
  logw.back() = tail > 0.0 ? std::log(tail) + log_new_fit : kNegInf;
  return logw;
}

OasState init_one_block(const std::vector<double>& y, const OasConfig& cfg, Rng& rng) {
  cfg.validate();
  if (y.empty()) throw std::invalid_argument("init_one_block: empty dataset");
  const int n = static_cast<int>(y.size());
  OasState st;
  st.order.resize(static_cast<std::size_t>(n));
  std::iota(st.order.begin(), st.order.end(), 0);
  st.alloc.d.assign(static_cast<std::size_t>(n), 1);
  st.alloc.counts = {n};
  BlockStats s;
  for (double v : y) s.add(v);
  st.comps = {sample_component(posterior_hyper(cfg.base, s), rng)};
  if (cfg.prior.size_biased()) {
    st.pblock = sample_sticks_posterior(cfg.prior, st.alloc.counts, rng).p;
  } else {
    st.gw = init_general_prior(cfg.prior, rng);
    sample_weights_posterior_general(st.gw, cfg.prior, st.alloc.counts, rng);
    prune_prefix(st.gw);
  }
  return st;
}

void update_one_allocation(OasState& st, const std::vector<double>& y, const OasConfig& cfg,
                           int pos, Rng& rng) {
  const bool sb = cfg.prior.size_biased();
  std::vector<int>& c = st.alloc.d;
  std::vector<int>& counts = st.alloc.counts;
  const double yi = st.data_at(y, pos);
  const int ci = c[static_cast<std::size_t>(pos)];

  // Detach the observation. When it sat alone, its (component, weight) pair is
  // kept aside and serves as the block-creating menu slot: a fresh prior draw
  // there would replace an occupied component by its prior rather than its
  // conditional and bias the chain. The collapsed variant integrates the
  // candidate out, so nothing needs preserving.
  bool preserved = false;
  GaussComponent pres_x{};
  double pres_p = 0.0;
  int pres_alpha = 0;
  if (counts[static_cast<std::size_t>(ci - 1)] == 1) {
    pres_x = st.comps[static_cast<std::size_t>(ci - 1)];
    if (sb)
      pres_p = st.pblock[static_cast<std::size_t>(ci - 1)];
    else
      pres_alpha = st.gw.alpha[static_cast<std::size_t>(ci - 1)];
    preserved = !cfg.collapsed;
    st.comps.erase(st.comps.begin() + (ci - 1));
    counts.erase(counts.begin() + (ci - 1));
    if (sb) {
      st.pblock.erase(st.pblock.begin() + (ci - 1));
    } else {
      st.gw.alpha.erase(st.gw.alpha.begin() + (ci - 1));
      if (!preserved) prune_prefix(st.gw);
    }
    for (int& cl : c)
      if (cl > ci) --cl;
  } else {
    --counts[static_cast<std::size_t>(ci - 1)];
  }
  c[static_cast<std::size_t>(pos)] = 0;

  const int k = static_cast<int>(counts.size());
  GaussComponent cand{};
  double log_new_fit;
  if (cfg.collapsed) {
    log_new_fit = log_marginal_likelihood_1(cfg.base, yi);
  } else {
    cand = preserved ? pres_x : sample_component(cfg.base, rng);
    log_new_fit = log_gauss(yi, cand);
  }

  std::vector<double> weights(static_cast<std::size_t>(k));
  std::vector<double> logfits(static_cast<std::size_t>(k));
  double occupied = 0.0;
  for (int j = 0; j < k; ++j) {
    const double pj = sb ? st.pblock[static_cast<std::size_t>(j)] : st.gw.pblock(j);
    weights[static_cast<std::size_t>(j)] = pj;
    occupied += pj;
    logfits[static_cast<std::size_t>(j)] = log_gauss(yi, st.comps[static_cast<std::size_t>(j)]);
  }
  const std::vector<double> logw = allocation_log_menu(weights, logfits, 1.0 - occupied, log_new_fit);
  const int pick = rng.categorical_log(logw) + 1;

  c[static_cast<std::size_t>(pos)] = pick;
  if (pick <= k) {
    ++counts[static_cast<std::size_t>(pick - 1)];
    if (preserved && !sb) prune_prefix(st.gw);  // the kept pick is now orphaned
    return;
  }
  counts.push_back(1);
  if (cfg.collapsed) {
    BlockStats s1;
    s1.add(yi);
    st.comps.push_back(sample_component(posterior_hyper(cfg.base, s1), rng));
    if (sb)
      st.pblock.push_back(discover_new_weight_sb(cfg.prior, st.pblock, rng));
    else
      discover_new_alpha(st.gw, cfg.prior, rng);
  } else if (preserved) {
    st.comps.push_back(pres_x);
    if (sb)
      st.pblock.push_back(pres_p);
    else
      st.gw.alpha.push_back(pres_alpha);
  } else {
    st.comps.push_back(cand);
    if (sb)
      st.pblock.push_back(discover_new_weight_sb(cfg.prior, st.pblock, rng));
    else
      discover_new_alpha(st.gw, cfg.prior, rng);
  }
}

void update_allocations(OasState& st, const std::vector<double>& y, const OasConfig& cfg,
                        Rng& rng) {
  const int n = st.alloc.n();
  std::vector<int> visit;
  if (cfg.randomize_order) visit = rng.permutation(n);
  for (int i = 0; i < n; ++i) update_one_allocation(st, y, cfg, cfg.randomize_order ? visit[static_cast<std::size_t>(i)] : i, rng);

  auto [d, sigma] = least_element_relabel(st.alloc.d);
  st.alloc.d = std::move(d);
  st.alloc.counts = counts_of(st.alloc.d, static_cast<int>(sigma.size()));
  st.comps = permute_by_sigma(st.comps, sigma);
  if (cfg.prior.size_biased()) {
    st.pblock = permute_by_sigma(st.pblock, sigma);
  } else {
    st.gw.alpha = permute_by_sigma(st.gw.alpha, sigma);
    prune_prefix(st.gw);
  }
}

void update_components(OasState& st, const std::vector<double>& y, const OasConfig& cfg,
                       Rng& rng) {
  const std::vector<BlockStats> stats = block_stats(st.alloc, st.order, y);
  for (int j = 0; j < st.alloc.k(); ++j)
    st.comps[static_cast<std::size_t>(j)] =
        sample_component(posterior_hyper(cfg.base, stats[static_cast<std::size_t>(j)]), rng);
}

void update_weights(OasState& st, const OasConfig& cfg, Rng& rng) {
  if (cfg.prior.size_biased()) {
    st.pblock = sample_sticks_posterior(cfg.prior, st.alloc.counts, rng).p;
    return;
  }
  const int k = st.alloc.k();
  if (k >= 2) {
    const AlphaMode mode =
        k <= cfg.enum_threshold ? AlphaMode::kEnumerate : AlphaMode::kLocallyBalanced;
    sample_alpha_block(st.gw, st.alloc.counts, mode, cfg.lb_steps, rng);
  }
  if (cfg.accelerate) alpha_acceleration(st.gw, cfg.prior, st.alloc.counts, rng);
  sample_weights_posterior_general(st.gw, cfg.prior, st.alloc.counts, rng);
  prune_prefix(st.gw);
}

void oas_sweep(OasState& st, const std::vector<double>& y, const OasConfig& cfg, Rng& rng) {
  update_allocations(st, y, cfg, rng);
  update_components(st, y, cfg, rng);
  update_weights(st, cfg, rng);
}

}  // namespace oasmix
