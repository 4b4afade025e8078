// Split-merge Metropolis-Hastings moves on ordered allocation states.
//
// A move picks two observations, proposes to split or merge the block(s)
// holding them, and accepts with the usual ratio. Proposals come from Gibbs
// scans restricted to the neighborhood of states that differ from the current
// one only by that split or merge; a "launch" state refined by a few such
// scans makes the proposal land near the restricted posterior. For ESB/GP
// weights the proposal scan draws the weight picks from their prior given the
// launch weights, so the proposal density has a closed form.
#pragma once

#include <vector>

#include "sampler_oas.hpp"

namespace oasmix {

// Neighborhood descriptor for a pair of positions (0-based).
struct SmContext {
  int i = 0;
  int j = 0;
  bool split = false;         // the two positions share a block in the anchor state
  std::vector<int> affected;  // other positions whose block holds i or j
  int k_target = 0;           // block count of every state in the neighborhood
};

SmContext build_neighborhood(const OasState& st, int i, int j);

// Output of one restricted scan. Densities are only meaningful when the scan
// ran as a proposal or an evaluation; they are split by factor so the
// reallocation probabilities can be inspected on their own.
struct ScanResult {
  OasState state;
  double log_g1 = 0.0;  // two-way reallocation probabilities over `affected`
  double log_g2 = 0.0;  // posterior densities of the redrawn components
  double log_g3 = 0.0;  // weight full conditional (plus pick sequence for ESB/GP)
  double log_density() const { return log_g1 + log_g2 + log_g3; }
};

// One Gibbs scan restricted to the neighborhood, started from `launch` (which
// must have ctx.k_target blocks).
//
//   target == nullptr, proposal == false: refresh step for launch states; for
//     ESB/GP the picks are resampled like a regular sweep (no usable density).
//   target == nullptr, proposal == true : draw a proposal and accumulate its
//     log density; ESB/GP picks come from their prior given the launch weights.
//   target != nullptr: no state is drawn; returns the log density of producing
//     exactly *target (whose partition must lie in the neighborhood). May still
//     consume randomness to realize ESB/GP prior weights past the launch prefix.
ScanResult restricted_scan(const SmContext& ctx, const OasState& launch,
                           const std::vector<double>& y, const OasConfig& cfg, bool proposal,
                           const OasState* target, Rng& rng);

// Random member of the neighborhood refined by `scans` restricted scans:
// allocations from a fair coin per affected position (split) or forced
// together (merge), redrawn components and weights from their priors (ESB/GP
// picks start at the first k raw weights), everything else copied from the
// anchor.
OasState make_launch(const SmContext& ctx, const OasState& anchor, const std::vector<double>& y,
                     const OasConfig& cfg, int scans, Rng& rng);

// Unnormalized log posterior density of a full state, in the same
// parameterization as the scan densities (block weights for DP/PY; raw weight
// prefix with picks for ESB, lambda for GP).
double log_state_posterior(const OasState& st, const std::vector<double>& y,
                           const OasConfig& cfg);

struct SmStats {
  long proposed_split = 0;
  long proposed_merge = 0;
  long accepted_split = 0;
  long accepted_merge = 0;
  double last_log_ratio = 0.0;
};

// One Metropolis-Hastings move: uniform pair, forward launch and proposal,
// reverse launch and density, accept or keep the state. Returns acceptance.
bool split_merge_move(OasState& st, const std::vector<double>& y, const OasConfig& cfg, int scans,
                      Rng& rng, SmStats* stats = nullptr);

}  // namespace oasmix
