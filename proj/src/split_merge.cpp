#include "split_merge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace oasmix {

namespace {

double log_sum_exp2(double a, double b) {
  const double m = std::max(a, b);
  if (!std::isfinite(m)) return m;
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// Outcome of the reallocation step: new least-element labels plus the
// permutation tying them back to the launch labels (sigma[d-1] is the launch
// label that became d).
struct Realloc {
  std::vector<int> dstar;
  std::vector<int> sigma;
  double log_prob = 0.0;
};

// c-vector a state in the neighborhood corresponds to, written in the launch
// state's labels: every affected position goes with i or with j as in `state`.
std::vector<int> c_outcome_of(const SmContext& ctx, const OasState& launch,
                              const OasState& state) {
  std::vector<int> c = launch.alloc.d;
  if (ctx.split) {
    const int ci = c[static_cast<std::size_t>(ctx.i)];
    const int cj = c[static_cast<std::size_t>(ctx.j)];
    for (int l : ctx.affected) {
      const bool with_i = state.alloc.d[static_cast<std::size_t>(l)] ==
                          state.alloc.d[static_cast<std::size_t>(ctx.i)];
      c[static_cast<std::size_t>(l)] = with_i ? ci : cj;
    }
  }
  return c;
}

// Reallocation of the affected positions between the blocks of i and j
// (split neighborhoods; merges admit a single allocation). `weight_of_label`
// holds the menu weight of each launch label. With a target, the Bernoulli
// probabilities of the target's arrangement are accumulated instead of drawn.
Realloc g1_reallocate(const SmContext& ctx, const OasState& launch,
                      const std::vector<double>& weight_of_label, const std::vector<double>& y,
                      bool want_density, const OasState* target, Rng& rng) {
  Realloc out;
  std::vector<int> c = launch.alloc.d;
  if (ctx.split) {
    const int ci = c[static_cast<std::size_t>(ctx.i)];
    const int cj = c[static_cast<std::size_t>(ctx.j)];
    if (ci == cj) throw std::logic_error("g1_reallocate: split launch keeps i and j together");
    for (int l : ctx.affected) {
      const double yl = launch.data_at(y, l);
      const double li = std::log(weight_of_label[static_cast<std::size_t>(ci - 1)]) +
                        log_gauss(yl, launch.comps[static_cast<std::size_t>(ci - 1)]);
      const double lj = std::log(weight_of_label[static_cast<std::size_t>(cj - 1)]) +
                        log_gauss(yl, launch.comps[static_cast<std::size_t>(cj - 1)]);
      bool with_i;
      if (target != nullptr) {
        with_i = target->alloc.d[static_cast<std::size_t>(l)] ==
                 target->alloc.d[static_cast<std::size_t>(ctx.i)];
      } else {
        with_i = rng.categorical_log({li, lj}) == 0;
      }
      c[static_cast<std::size_t>(l)] = with_i ? ci : cj;
      if (want_density) out.log_prob += (with_i ? li : lj) - log_sum_exp2(li, lj);
    }
  }
  auto rel = least_element_relabel(c);
  out.dstar = std::move(rel.first);
  out.sigma = std::move(rel.second);
  return out;
}

// Block labels whose components get redrawn: both halves of a split, the
// united block of a merge.
std::vector<int> redrawn_labels(const SmContext& ctx, const std::vector<int>& dstar) {
  const int di = dstar[static_cast<std::size_t>(ctx.i)];
  const int dj = dstar[static_cast<std::size_t>(ctx.j)];
  if (di == dj) return {di};
  return {di, dj};
}

AlphaMode alpha_mode_for(const OasConfig& cfg, int k) {
  return k <= cfg.enum_threshold ? AlphaMode::kEnumerate : AlphaMode::kLocallyBalanced;
}

}  // namespace

SmContext build_neighborhood(const OasState& st, int i, int j) {
  const int n = st.alloc.n();
  if (i == j || i < 0 || j < 0 || i >= n || j >= n)
    throw std::invalid_argument("build_neighborhood: need two distinct positions");
  SmContext ctx;
  ctx.i = i;
  ctx.j = j;
  const int di = st.alloc.d[static_cast<std::size_t>(i)];
  const int dj = st.alloc.d[static_cast<std::size_t>(j)];
  ctx.split = di == dj;
  for (int l = 0; l < n; ++l) {
    if (l == i || l == j) continue;
    const int dl = st.alloc.d[static_cast<std::size_t>(l)];
    if (dl == di || dl == dj) ctx.affected.push_back(l);
  }
  ctx.k_target = st.alloc.k() + (ctx.split ? 1 : -1);
  return ctx;
}

ScanResult restricted_scan(const SmContext& ctx, const OasState& launch,
                           const std::vector<double>& y, const OasConfig& cfg, bool proposal,
                           const OasState* target, Rng& rng) {
  const bool sb = cfg.prior.size_biased();
  const int k = ctx.k_target;
  if (launch.alloc.k() != k) throw std::logic_error("restricted_scan: launch dimension mismatch");
  if (target != nullptr && target->alloc.k() != k)
    throw std::logic_error("restricted_scan: target dimension mismatch");
  const bool want_density = proposal || target != nullptr;

  ScanResult out;
  out.state.order = launch.order;

  // ESB/GP proposals draw the weight picks a priori given the launch weights,
  // so the pick density is in closed form; the picks are fixed before the
  // reallocation step, indexed by launch label.
  const bool prior_picks = !sb && want_density;
  GeneralWeights gwl = launch.gw;
  std::vector<int> picks_by_label;
  if (prior_picks) {
    picks_by_label.resize(static_cast<std::size_t>(k));
    if (target != nullptr) {
      // The relabeling is fixed by the target's arrangement, so the
      // pre-relabel picks can be read off the target.
      const auto rel = least_element_relabel(c_outcome_of(ctx, launch, *target));
      for (int d = 1; d <= k; ++d)
        picks_by_label[static_cast<std::size_t>(rel.second[static_cast<std::size_t>(d - 1)] - 1)] =
            target->gw.alpha[static_cast<std::size_t>(d - 1)];
      const int need = *std::max_element(picks_by_label.begin(), picks_by_label.end());
      while (gwl.L() < need) extend_prefix(gwl, cfg.prior, rng);
    } else {
      GeneralWeights scratch = gwl;
      scratch.alpha.clear();
      for (int t = 0; t < k; ++t)
        picks_by_label[static_cast<std::size_t>(t)] = discover_new_alpha(scratch, cfg.prior, rng);
      scratch.alpha = gwl.alpha;
      gwl = std::move(scratch);
    }
    out.log_g3 += log_alpha_sequence_density(gwl, picks_by_label);
  }

  // Reallocation.
  std::vector<double> weight_of_label(static_cast<std::size_t>(k));
  for (int c = 1; c <= k; ++c) {
    double w;
    if (sb)
      w = launch.pblock[static_cast<std::size_t>(c - 1)];
    else if (prior_picks)
      w = gwl.p[static_cast<std::size_t>(picks_by_label[static_cast<std::size_t>(c - 1)] - 1)];
    else
      w = launch.gw.pblock(c - 1);
    weight_of_label[static_cast<std::size_t>(c - 1)] = w;
  }
  Realloc g1 = g1_reallocate(ctx, launch, weight_of_label, y, want_density, target, rng);
  out.log_g1 = g1.log_prob;
  if (target != nullptr && g1.dstar != target->alloc.d)
    throw std::logic_error("restricted_scan: target partition not reachable from the launch");
  out.state.alloc = make_allocation(g1.dstar);

  // Components: copy through the relabeling, redraw the affected block(s)
  // from their conjugate posterior.
  out.state.comps.resize(static_cast<std::size_t>(k));
  for (int d = 1; d <= k; ++d)
    out.state.comps[static_cast<std::size_t>(d - 1)] =
        launch.comps[static_cast<std::size_t>(g1.sigma[static_cast<std::size_t>(d - 1)] - 1)];
  const std::vector<BlockStats> stats = block_stats(out.state.alloc, out.state.order, y);
  for (int d : redrawn_labels(ctx, g1.dstar)) {
    const NormalGammaBase hyper = posterior_hyper(cfg.base, stats[static_cast<std::size_t>(d - 1)]);
    if (target != nullptr) {
      out.log_g2 += log_normal_gamma_pdf(hyper, target->comps[static_cast<std::size_t>(d - 1)]);
    } else {
      GaussComponent& comp = out.state.comps[static_cast<std::size_t>(d - 1)];
      comp = sample_component(hyper, rng);
      if (want_density) out.log_g2 += log_normal_gamma_pdf(hyper, comp);
    }
  }

  // Weights.
  const std::vector<int>& counts = out.state.alloc.counts;
  if (sb) {
    if (target != nullptr) {
      out.log_g3 +=
          log_stick_weight_density(target->pblock, stick_posterior_params(cfg.prior, counts));
    } else {
      const StickWeights sw = sample_sticks_posterior(cfg.prior, counts, rng);
      out.state.pblock = sw.p;
      if (want_density)
        out.log_g3 += log_stick_weight_density(sw.p, stick_posterior_params(cfg.prior, counts));
    }
  } else if (prior_picks) {
    if (target != nullptr) {
      out.log_g3 += log_general_prefix_posterior(target->gw, cfg.prior,
                                                 alpha_exponents(target->gw, counts));
    } else {
      out.state.gw = std::move(gwl);
      out.state.gw.alpha = permute_by_sigma(picks_by_label, g1.sigma);
      sample_weights_posterior_general(out.state.gw, cfg.prior, counts, rng);
      prune_prefix(out.state.gw);
      out.log_g3 += log_general_prefix_posterior(out.state.gw, cfg.prior,
                                                 alpha_exponents(out.state.gw, counts));
    }
  } else {
    // Launch refresh: resample the picks and weights like a regular sweep.
    out.state.gw = launch.gw;
    out.state.gw.alpha = permute_by_sigma(out.state.gw.alpha, g1.sigma);
    if (k >= 2)
      sample_alpha_block(out.state.gw, counts, alpha_mode_for(cfg, k), cfg.lb_steps, rng);
    if (cfg.accelerate) alpha_acceleration(out.state.gw, cfg.prior, counts, rng);
    sample_weights_posterior_general(out.state.gw, cfg.prior, counts, rng);
    prune_prefix(out.state.gw);
  }

  if (target != nullptr) out.state = *target;
  return out;
}

OasState make_launch(const SmContext& ctx, const OasState& anchor, const std::vector<double>& y,
                     const OasConfig& cfg, int scans, Rng& rng) {
  const bool sb = cfg.prior.size_biased();
  const int k = ctx.k_target;

  // Allocations: coin flips between i's and a fresh block (split) or everyone
  // with j (merge), then back to least-element form.
  std::vector<int> c = anchor.alloc.d;
  if (ctx.split) {
    const int fresh = anchor.alloc.k() + 1;
    c[static_cast<std::size_t>(ctx.j)] = fresh;
    for (int l : ctx.affected)
      c[static_cast<std::size_t>(l)] =
          rng.uniform01() < 0.5 ? c[static_cast<std::size_t>(ctx.i)] : fresh;

    // Sequential two-way passes over the affected points, each reassigned by
    // block size times the conjugate predictive of the block's other members.
    // Batch reallocation against the two freshly refit components cannot break
    // the symmetry of the coin-flip blocks within a handful of scans, so the
    // launch would almost never land on a mode-separating split; the
    // point-by-point form feeds each assignment into the next predictive and
    // separates readily. Only the final scan's densities enter the acceptance
    // ratio, so the launch may be refined by any neighborhood-measurable rule.
    const int ci = c[static_cast<std::size_t>(ctx.i)];
    BlockStats stats_i, stats_f;
    for (int p = 0; p < anchor.alloc.n(); ++p)
      if (c[static_cast<std::size_t>(p)] == ci)
        stats_i.add(y[static_cast<std::size_t>(anchor.order[static_cast<std::size_t>(p)])]);
      else if (c[static_cast<std::size_t>(p)] == fresh)
        stats_f.add(y[static_cast<std::size_t>(anchor.order[static_cast<std::size_t>(p)])]);
    for (int t = 0; t < scans; ++t) {
      for (int l : ctx.affected) {
        const double yl = y[static_cast<std::size_t>(anchor.order[static_cast<std::size_t>(l)])];
        BlockStats& cur = c[static_cast<std::size_t>(l)] == ci ? stats_i : stats_f;
        cur.n -= 1; cur.sum -= yl; cur.sumsq -= yl * yl;
        const auto pred = [&](const BlockStats& s) {
          BlockStats with = s;
          with.add(yl);
          return std::log(static_cast<double>(s.n)) + log_marginal_likelihood(cfg.base, with) -
                 log_marginal_likelihood(cfg.base, s);
        };
        const int pick = rng.categorical_log({pred(stats_i), pred(stats_f)});
        c[static_cast<std::size_t>(l)] = pick == 0 ? ci : fresh;
        BlockStats& dst = pick == 0 ? stats_i : stats_f;
        dst.add(yl);
      }
    }
  } else {
    const int cj = c[static_cast<std::size_t>(ctx.j)];
    c[static_cast<std::size_t>(ctx.i)] = cj;
    for (int l : ctx.affected) c[static_cast<std::size_t>(l)] = cj;
  }
  auto rel = least_element_relabel(c);

  OasState launch;
  launch.order = anchor.order;
  launch.alloc = make_allocation(rel.first);

  // Components: unaffected blocks keep the anchor's parameters; the block(s)
  // holding i and j start from the posterior of their initial members. A raw
  // prior draw would be so diffuse here that the first scan's two-way
  // reallocation empties one block and the refinement never recovers; the
  // launch distribution is a free choice, so seed it where the data sit.
  launch.comps.resize(static_cast<std::size_t>(k));
  for (int d = 1; d <= k; ++d) {
    const int old = rel.second[static_cast<std::size_t>(d - 1)];
    if (old <= anchor.alloc.k())
      launch.comps[static_cast<std::size_t>(d - 1)] =
          anchor.comps[static_cast<std::size_t>(old - 1)];
  }
  const auto init_stats = block_stats(launch.alloc, launch.order, y);
  for (int d : redrawn_labels(ctx, launch.alloc.d))
    launch.comps[static_cast<std::size_t>(d - 1)] =
        sample_component(posterior_hyper(cfg.base, init_stats[static_cast<std::size_t>(d - 1)]),
                         rng);

  // Weights: prior sticks for DP/PY; for ESB/GP a k-long prefix with picks
  // (1..k) rather than a size-biased draw. The GP lambda comes from its full
  // conditional at those picks, not the raw prior: the proposal scan's
  // discovery walk is O(1/lambda) deep, so a raw prior draw near zero stalls
  // the move, while the launch distribution itself is a free choice (only the
  // restricted-scan densities enter the acceptance ratio).
  if (sb) {
    launch.pblock = sample_sticks_prior(cfg.prior, k, rng).p;
  } else {
    GeneralWeights gw;
    if (cfg.prior.kind == PriorKind::kGP) {
      const std::vector<long> r(launch.alloc.counts.begin(), launch.alloc.counts.end());
      const auto lp = gp_lambda_posterior_params(cfg.prior, r);
      gw.lambda = rng.beta(lp.first, lp.second);
    }
    for (int l = 0; l < k; ++l) extend_prefix(gw, cfg.prior, rng);
    gw.alpha.resize(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) gw.alpha[static_cast<std::size_t>(t)] = t + 1;
    launch.gw = std::move(gw);
  }

  for (int t = 0; t < scans; ++t) {
    ScanResult sr = restricted_scan(ctx, launch, y, cfg, false, nullptr, rng);
    launch = std::move(sr.state);
  }
  return launch;
}

double log_state_posterior(const OasState& st, const std::vector<double>& y,
                           const OasConfig& cfg) {
  const int n = st.alloc.n();
  const int k = st.alloc.k();
  double lp = 0.0;
  for (int pos = 0; pos < n; ++pos)
    lp += log_gauss(st.data_at(y, pos),
                    st.comps[static_cast<std::size_t>(st.alloc.d[static_cast<std::size_t>(pos)] - 1)]);
  for (const GaussComponent& comp : st.comps) lp += log_normal_gamma_pdf(cfg.base, comp);
  if (cfg.prior.size_biased()) {
    double cum = 0.0;
    for (int j = 0; j < k; ++j) {
      const double pj = st.pblock[static_cast<std::size_t>(j)];
      lp += (st.alloc.counts[static_cast<std::size_t>(j)] - 1) * std::log(pj) + std::log1p(-cum);
      cum += pj;
    }
    lp += log_stick_weight_density(st.pblock, stick_prior_params(cfg.prior, k));
  } else {
    for (int j = 0; j < k; ++j)
      lp += st.alloc.counts[static_cast<std::size_t>(j)] * std::log(st.gw.pblock(j));
    lp += log_general_prefix_prior(st.gw, cfg.prior);
  }
  return lp;
}

bool split_merge_move(OasState& st, const std::vector<double>& y, const OasConfig& cfg, int scans,
                      Rng& rng, SmStats* stats) {
  const int n = st.alloc.n();
  if (n < 2) throw std::invalid_argument("split_merge_move: need at least two observations");
  if (scans < 0) throw std::invalid_argument("split_merge_move: negative scan count");

  const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
  if (j >= i) ++j;

  const SmContext ctx = build_neighborhood(st, i, j);
  const OasState launch = make_launch(ctx, st, y, cfg, scans, rng);
  ScanResult prop = restricted_scan(ctx, launch, y, cfg, true, nullptr, rng);

  const SmContext rctx = build_neighborhood(prop.state, i, j);
  const OasState rlaunch = make_launch(rctx, prop.state, y, cfg, scans, rng);
  const ScanResult rev = restricted_scan(rctx, rlaunch, y, cfg, true, &st, rng);

  const double log_ratio = log_state_posterior(prop.state, y, cfg) + rev.log_density() -
                           log_state_posterior(st, y, cfg) - prop.log_density();
  if (stats != nullptr) {
    ++(ctx.split ? stats->proposed_split : stats->proposed_merge);
    stats->last_log_ratio = log_ratio;
  }
  const bool accept = log_ratio >= 0.0 || std::log(rng.uniform01()) < log_ratio;
  if (accept) {
    st = std::move(prop.state);
    if (stats != nullptr) ++(ctx.split ? stats->accepted_split : stats->accepted_merge);
  }
  return accept;
}

}  // namespace oasmix
