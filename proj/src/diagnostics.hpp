// Chain statistics: autocorrelations and integrated autocorrelation time
// with the cutoff rule, deviance, efficiency ratios, density estimates on a
// grid with total-variation distance, the exact small-n partition posterior
// used as a correctness oracle, and trace CSV I/O.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "model.hpp"
#include "weights.hpp"

namespace oasmix {

// Standard sample autocorrelation at the given lag (lag >= 1).
double autocorrelation(const std::vector<double>& x, long lag);

struct IatResult {
  double tau = 0.0;   // 1/2 + sum of autocorrelations below the cutoff
  double se = 0.0;    // batch-means standard error (50 non-overlapping batches)
  long cutoff = 0;    // first lag whose autocorrelation drops below 2/sqrt(N)
};

// Integrated autocorrelation time with cutoff C = min{l : rho_l < 2/sqrt(N)}:
// tau = 1/2 + sum_{l<C} rho_l. Requires N >= 100 and positive variance.
IatResult iat(const std::vector<double>& x);

// D = -2 sum_i log sum_j (n_j/n) g(y_i | x_j), computed in log space.
double deviance(const std::vector<double>& y, const std::vector<int>& counts,
                const std::vector<GaussComponent>& comps);

// (tau_s * time_s) / (tau_ref * time_ref); all inputs must be positive.
double efficiency_ratio(double tau_s, double time_s, double tau_ref, double time_ref);

// Uniform evaluation grid. Bounds from the mixture's component tails so the
// enclosed mass is at least 1 - 1e-6 (5e-7 cut per side).
struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  double dx = 0.0;
  std::vector<double> x;
};

Grid make_grid(const MixtureSpec& truth, int npts);
std::vector<double> mixture_density_on_grid(const MixtureSpec& m, const Grid& g);

// 1/2 * trapezoid of |f - fhat| on the grid. Errors if the grid holds less
// than 1 - 1e-6 of f's mass (checked with the exact mixture CDF).
double total_variation(const MixtureSpec& f, const Grid& g, const std::vector<double>& fhat);

// Pointwise Monte Carlo average of the per-iteration mixture density
// sum_j (n_j/n) g(x | comps_j) over retained iterations.
class DensityAccumulator {
 public:
  explicit DensityAccumulator(const Grid& g) : grid_(g), sum_(g.x.size(), 0.0) {}
  void add(const std::vector<int>& counts, const std::vector<GaussComponent>& comps);
  std::vector<double> average() const;  // errors when no iteration was added
  long iterations() const { return iters_; }

 private:
  Grid grid_;
  std::vector<double> sum_;
  long iters_ = 0;
};

// Exact partition laws by enumeration (n <= 8), keyed by partition signature.
// Prior weights follow the DP/PY sequential prediction rule; the posterior
// multiplies in each block's marginal likelihood. DP/PY only.
std::map<std::string, double> exact_partition_prior(int n, const MixingPrior& prior);
std::map<std::string, double> exact_partition_posterior(const std::vector<double>& y,
                                                        const MixingPrior& prior,
                                                        const NormalGammaBase& base);

// Total variation between two partition distributions (union of keys).
double partition_tv(const std::map<std::string, double>& a,
                    const std::map<std::string, double>& b);

// Regularized incomplete beta I_x(a, b) and the Student-t upper tail built on
// it (used by the paired one-sided test).
double reg_incomplete_beta(double a, double b, double x);
double student_t_upper_tail(double t, double df);

struct PairedTTest {
  double mean_diff = 0.0;  // mean of (without - with)
  double tstat = 0.0;
  double pvalue = 1.0;  // one-sided: P(T_{n-1} > tstat)
  long n = 0;
};

// One-sided paired test of mean(with) < mean(without).
PairedTTest paired_one_sided(const std::vector<double>& with_values,
                             const std::vector<double>& without_values);

// One monitored iteration of a chain.
struct TraceRow {
  long iter = 0;
  int k = 0;
  double deviance = 0.0;
  std::string partition;
  long long wall_ns = 0;
};

// CSV schema: header `iter,k_n,deviance,partition,wall_ns`; deviance printed
// with 17 significant digits so values round-trip bitwise. wall_ns is
// measured time and is the only column that varies across identical reruns.
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_trace_csv(const std::string& path);

}  // namespace oasmix
