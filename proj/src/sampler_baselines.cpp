#include "sampler_baselines.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace oasmix {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void permute_positions(OasState& st, const OasConfig& cfg, Rng& rng) {
  const int n = st.alloc.n();
  const std::vector<int> rho = rng.permutation(n);
  std::vector<int> neworder(static_cast<std::size_t>(n));
  std::vector<int> newc(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    neworder[static_cast<std::size_t>(p)] = st.order[static_cast<std::size_t>(rho[static_cast<std::size_t>(p)])];
    newc[static_cast<std::size_t>(p)] = st.alloc.d[static_cast<std::size_t>(rho[static_cast<std::size_t>(p)])];
  }
  auto [d, sigma] = least_element_relabel(newc);
  st.order = std::move(neworder);
  st.alloc.d = std::move(d);
  st.alloc.counts = counts_of(st.alloc.d, static_cast<int>(sigma.size()));
  st.comps = permute_by_sigma(st.comps, sigma);
  if (cfg.prior.size_biased())
    st.pblock = permute_by_sigma(st.pblock, sigma);
  else
    st.gw.alpha = permute_by_sigma(st.gw.alpha, sigma);
}

void ooas_update_one_allocation(OasState& st, const std::vector<double>& y, const OasConfig& cfg,
                                int pos, Rng& rng) {
  const auto [lo, hi] = admissible_move_range(st.alloc.d, pos + 1);
  if (lo == hi) return;  // frozen position: no move, no randomness

  const bool sb = cfg.prior.size_biased();
  const int di = st.alloc.d[static_cast<std::size_t>(pos)];
  const int kn = st.alloc.k();
  const bool singleton_last = st.alloc.counts[static_cast<std::size_t>(di - 1)] == 1;
  const int kmi = singleton_last ? kn - 1 : kn;  // blocks held by the other observations
  const double yi = st.data_at(y, pos);

  double occupied = 0.0;
  for (int j = 1; j <= kmi; ++j) occupied += st.weight(j);

  // The block-creating slot: reuse the pair the observation already owns when
  // it sits alone in the last block; otherwise a fresh prior draw.
  GaussComponent cand{};
  const bool creating_in_range = hi == kmi + 1;
  const bool need_fresh = creating_in_range && !singleton_last;
  if (need_fresh) cand = sample_component(cfg.base, rng);

  std::vector<double> logw(static_cast<std::size_t>(hi - lo + 1));
  for (int v = lo; v <= hi; ++v) {
    double lw;
    if (v <= kmi) {
      lw = std::log(st.weight(v)) + log_gauss(yi, st.comps[static_cast<std::size_t>(v - 1)]);
    } else {
      const GaussComponent& slot = singleton_last ? st.comps[static_cast<std::size_t>(kn - 1)] : cand;
      const double tail = 1.0 - occupied;
      lw = tail > 0.0 ? std::log(tail) + log_gauss(yi, slot) : kNegInf;
    }
    logw[static_cast<std::size_t>(v - lo)] = lw;
  }
  const int pick = lo + rng.categorical_log(logw);
  if (pick == di) return;

  if (singleton_last && di != kn)
    throw std::logic_error("ooas_update_one_allocation: singleton outside the last block moved");
  if (singleton_last) {
    st.comps.pop_back();
    st.alloc.counts.pop_back();
    if (sb) {
      st.pblock.pop_back();
    } else {
      st.gw.alpha.pop_back();
      prune_prefix(st.gw);
    }
  } else {
    --st.alloc.counts[static_cast<std::size_t>(di - 1)];
  }
  if (pick <= static_cast<int>(st.alloc.counts.size())) {
    ++st.alloc.counts[static_cast<std::size_t>(pick - 1)];
  } else {
    st.alloc.counts.push_back(1);
    st.comps.push_back(cand);
    if (sb)
      st.pblock.push_back(discover_new_weight_sb(cfg.prior, st.pblock, rng));
    else
      discover_new_alpha(st.gw, cfg.prior, rng);
  }
  st.alloc.d[static_cast<std::size_t>(pos)] = pick;
}

void ooas_sweep(OasState& st, const std::vector<double>& y, const OasConfig& cfg, Rng& rng) {
  if (cfg.collapsed)
    throw std::invalid_argument("ooas_sweep: no collapsed variant of this sampler");
  permute_positions(st, cfg, rng);
  for (int pos = 0; pos < st.alloc.n(); ++pos) ooas_update_one_allocation(st, y, cfg, pos, rng);
  update_components(st, y, cfg, rng);
  update_weights(st, cfg, rng);
}

// --- Marginal sampler --------------------------------------------------------

void MarginalState::validate() const {
  if (c.empty()) throw std::runtime_error("MarginalState: empty allocation");
  if (counts.size() != comps.size())
    throw std::runtime_error("MarginalState: one component per block required");
  std::vector<int> recount(counts.size(), 0);
  for (int ci : c) {
    if (ci < 1 || ci > k()) throw std::runtime_error("MarginalState: label out of range");
    ++recount[static_cast<std::size_t>(ci - 1)];
  }
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] != recount[j]) throw std::runtime_error("MarginalState: counts out of sync");
    if (counts[j] < 1) throw std::runtime_error("MarginalState: empty block");
  }
  for (const GaussComponent& x : comps)
    if (!(x.tau > 0.0) || !std::isfinite(x.mu) || !std::isfinite(x.tau))
      throw std::runtime_error("MarginalState: invalid component");
}

MarginalState init_marginal_one_block(const std::vector<double>& y, const NormalGammaBase& base,
                                      Rng& rng) {
  base.validate();
  if (y.empty()) throw std::invalid_argument("init_marginal_one_block: empty dataset");
  MarginalState st;
  st.c.assign(y.size(), 1);
  st.counts = {static_cast<int>(y.size())};
  BlockStats s;
  for (double v : y) s.add(v);
  st.comps = {sample_component(posterior_hyper(base, s), rng)};
  return st;
}

void marginal_update_one_allocation(MarginalState& st, const std::vector<double>& y,
                                    const MixingPrior& prior, const NormalGammaBase& base,
                                    int pos, Rng& rng) {
  const int ci = st.c[static_cast<std::size_t>(pos)];
  const double yi = y[static_cast<std::size_t>(pos)];

  // Detach. A component left empty is removed but serves as the candidate for
  // the block-creating move; redrawing it from the prior instead would bias
  // the chain (its conditional given the current allocation is not the prior).
  GaussComponent aux{};
  if (st.counts[static_cast<std::size_t>(ci - 1)] == 1) {
    aux = st.comps[static_cast<std::size_t>(ci - 1)];
    st.comps.erase(st.comps.begin() + (ci - 1));
    st.counts.erase(st.counts.begin() + (ci - 1));
    for (int& cl : st.c)
      if (cl > ci) --cl;
  } else {
    --st.counts[static_cast<std::size_t>(ci - 1)];
    aux = sample_component(base, rng);
  }
  st.c[static_cast<std::size_t>(pos)] = 0;

  const int k = st.k();
  std::vector<double> logw(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j < k; ++j)
    logw[static_cast<std::size_t>(j)] =
        std::log(static_cast<double>(st.counts[static_cast<std::size_t>(j)]) - prior.sigma) +
        log_gauss(yi, st.comps[static_cast<std::size_t>(j)]);
  logw[static_cast<std::size_t>(k)] =
      std::log(prior.beta + static_cast<double>(k) * prior.sigma) + log_gauss(yi, aux);
  const int pick = rng.categorical_log(logw) + 1;

  st.c[static_cast<std::size_t>(pos)] = pick;
  if (pick <= k) {
    ++st.counts[static_cast<std::size_t>(pick - 1)];
  } else {
    st.counts.push_back(1);
    st.comps.push_back(aux);
  }
}

void marginal_sweep(MarginalState& st, const std::vector<double>& y, const MixingPrior& prior,
                    const NormalGammaBase& base, Rng& rng) {
  if (!prior.size_biased())
    throw std::invalid_argument(
        "marginal_sweep: needs a tractable predictive rule (DP or PY prior)");
  for (int pos = 0; pos < st.n(); ++pos)
    marginal_update_one_allocation(st, y, prior, base, pos, rng);
  std::vector<BlockStats> stats(static_cast<std::size_t>(st.k()));
  for (int pos = 0; pos < st.n(); ++pos)
    stats[static_cast<std::size_t>(st.c[static_cast<std::size_t>(pos)] - 1)].add(
        y[static_cast<std::size_t>(pos)]);
  for (int j = 0; j < st.k(); ++j)
    st.comps[static_cast<std::size_t>(j)] =
        sample_component(posterior_hyper(base, stats[static_cast<std::size_t>(j)]), rng);
}

}  // namespace oasmix
