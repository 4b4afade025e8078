// Ordered allocation Gibbs sampler for Gaussian mixtures with Dirichlet,
// Pitman-Yor, exchangeable stick-breaking or geometric mixing weights.
//
// One sweep updates, in order: the allocation variables (sequentially, in
// unordered label space, restoring least-element order at the end), the
// per-block component parameters, and the block weights.
#pragma once

#include <vector>

#include "model.hpp"
#include "weights.hpp"

namespace oasmix {

struct OasConfig {
  NormalGammaBase base;
  MixingPrior prior;
  bool collapsed = false;        // integrate the candidate component out of the menu
  bool accelerate = true;        // ESB/GP: pick-switch pass each sweep
  bool randomize_order = false;  // visit positions in random order (diagnostic aid)
  int lb_steps = 10;             // locally balanced steps when k > enum_threshold
  int enum_threshold = 6;        // largest k updated by exact enumeration
  void validate() const;
};

// Gibbs state: ordered allocations, one component per block, and the block
// weights in discovery order (held directly for DP/PY, via picks for ESB/GP).
struct OasState {
  AllocationState alloc;
  std::vector<GaussComponent> comps;  // comps[j-1] belongs to block j
  std::vector<double> pblock;         // DP/PY path: block weights
  GeneralWeights gw;                  // ESB/GP path: raw prefix + picks
  std::vector<int> order;             // position -> 0-based data index

  double weight(int j) const;  // weight of block j (1-based), either path
  double data_at(const std::vector<double>& y, int pos) const { return y[order[pos]]; }
  void validate(const OasConfig& cfg) const;  // throws on invariant violation
};

// out[j] = v[sigma[j] - 1]: reorders per-block values after a relabeling.
template <typename T>
std::vector<T> permute_by_sigma(const std::vector<T>& v, const std::vector<int>& sigma) {
  std::vector<T> out(sigma.size());
  for (std::size_t j = 0; j < sigma.size(); ++j) out[j] = v[static_cast<std::size_t>(sigma[j] - 1)];
  return out;
}

// Per-block sufficient statistics (block j at index j-1).
std::vector<BlockStats> block_stats(const AllocationState& alloc, const std::vector<int>& order,
                                    const std::vector<double>& y);

// Unnormalized log menu for one detached observation: entry j < k is
// log(weights[j]) + logfits[j]; the last entry is log(tail) + log_new_fit for
// the block-creating move (-inf when tail <= 0, so the move is off the menu).
std::vector<double> allocation_log_menu(const std::vector<double>& weights,
                                        const std::vector<double>& logfits, double tail,
                                        double log_new_fit);

// All observations in one block; component and weights from their conditionals.
OasState init_one_block(const std::vector<double>& y, const OasConfig& cfg, Rng& rng);

// Resamples the allocation of the observation at `pos` (0-based position).
// Labels are treated as unordered: the state afterwards may not be in
// least-element form. update_allocations restores it after the full pass.
void update_one_allocation(OasState& st, const std::vector<double>& y, const OasConfig& cfg,
                           int pos, Rng& rng);

void update_allocations(OasState& st, const std::vector<double>& y, const OasConfig& cfg,
                        Rng& rng);
void update_components(OasState& st, const std::vector<double>& y, const OasConfig& cfg,
                       Rng& rng);
void update_weights(OasState& st, const OasConfig& cfg, Rng& rng);

// One full sweep: allocations, components, weights.
void oas_sweep(OasState& st, const std::vector<double>& y, const OasConfig& cfg, Rng& rng);

}  // namespace oasmix
