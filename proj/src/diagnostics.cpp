#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace oasmix {

namespace {

double series_mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

// tau and cutoff for a centered series; false when the variance is zero.
bool iat_tau(const std::vector<double>& x, double* tau, long* cutoff) {
  const long n = static_cast<long>(x.size());
  const double m = series_mean(x);
  double g0 = 0.0;
  for (double v : x) g0 += (v - m) * (v - m);
  g0 /= static_cast<double>(n);
  if (!(g0 > 0.0)) return false;
  const double threshold = 2.0 / std::sqrt(static_cast<double>(n));
  const long cap = n / 2;
  double acc = 0.5;
  long c = cap;
  for (long lag = 1; lag <= cap; ++lag) {
    double g = 0.0;
    for (long t = 0; t + lag < n; ++t) g += (x[t] - m) * (x[t + lag] - m);
    g /= static_cast<double>(n);
    const double rho = g / g0;
    if (rho < threshold) {
      c = lag;
      break;
    }
    acc += rho;
  }
  *tau = acc;
  *cutoff = c;
  return true;
}

}  // namespace

double autocorrelation(const std::vector<double>& x, long lag) {
  const long n = static_cast<long>(x.size());
  if (lag < 1 || n <= lag) throw std::invalid_argument("autocorrelation: need length > lag >= 1");
  const double m = series_mean(x);
  double g0 = 0.0, g = 0.0;
  for (double v : x) g0 += (v - m) * (v - m);
  if (!(g0 > 0.0)) throw std::invalid_argument("autocorrelation: zero-variance series");
  for (long t = 0; t + lag < n; ++t) g += (x[t] - m) * (x[t + lag] - m);
  return g / g0;
}

IatResult iat(const std::vector<double>& x) {
  const long n = static_cast<long>(x.size());
  if (n < 100) throw std::invalid_argument("iat: need at least 100 samples");
  IatResult r;
  if (!iat_tau(x, &r.tau, &r.cutoff))
    throw std::invalid_argument("iat: zero-variance series");

  // Batch-means standard error over 50 non-overlapping batches.
  const int nb = 50;
  const long len = n / nb;
  std::vector<double> taus;
  std::vector<double> batch(len);
  for (int b = 0; b < nb; ++b) {
    std::copy(x.begin() + b * len, x.begin() + (b + 1) * len, batch.begin());
    double t = 0.0;
    long c = 0;
    if (iat_tau(batch, &t, &c)) taus.push_back(t);
  }
  if (taus.size() >= 2) {
    const double tm = series_mean(taus);
    double var = 0.0;
    for (double t : taus) var += (t - tm) * (t - tm);
    var /= static_cast<double>(taus.size() - 1);
    r.se = std::sqrt(var / static_cast<double>(taus.size()));
  } else {
    r.se = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

double deviance(const std::vector<double>& y, const std::vector<int>& counts,
                const std::vector<GaussComponent>& comps) {
  if (counts.size() != comps.size())
    throw std::invalid_argument("deviance: counts/components size mismatch");
  if (counts.empty()) throw std::invalid_argument("deviance: no components");
  long n = 0;
  for (int c : counts) {
    if (c <= 0) throw std::invalid_argument("deviance: empty block");
    n += c;
  }
  std::vector<double> logw(counts.size());
  for (std::size_t j = 0; j < counts.size(); ++j)
    logw[j] = std::log(static_cast<double>(counts[j]) / static_cast<double>(n));
  double dev = 0.0;
  std::vector<double> terms(counts.size());
  for (double yi : y) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < counts.size(); ++j) {
      terms[j] = logw[j] + log_gauss(yi, comps[j]);
      m = std::max(m, terms[j]);
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - m);
    dev += -2.0 * (m + std::log(s));
  }
  return dev;
}

double efficiency_ratio(double tau_s, double time_s, double tau_ref, double time_ref) {
  if (!(tau_s > 0.0) || !(time_s > 0.0) || !(tau_ref > 0.0) || !(time_ref > 0.0))
    throw std::invalid_argument("efficiency_ratio: all inputs must be positive");
  return (tau_s * time_s) / (tau_ref * time_ref);
}

Grid make_grid(const MixtureSpec& truth, int npts) {
  truth.validate();
  if (npts < 2) throw std::invalid_argument("make_grid: need at least 2 points");
  // 5 standard deviations per component: per-side tail mass 2.9e-7, so the
  // grid always holds more than 1 - 1e-6 of the mixture's mass.
  const double z = 5.0;
  Grid g;
  g.lo = truth.mu[0] - z * truth.sd[0];
  g.hi = truth.mu[0] + z * truth.sd[0];
  for (std::size_t i = 1; i < truth.mu.size(); ++i) {
    g.lo = std::min(g.lo, truth.mu[i] - z * truth.sd[i]);
    g.hi = std::max(g.hi, truth.mu[i] + z * truth.sd[i]);
  }
  g.dx = (g.hi - g.lo) / static_cast<double>(npts - 1);
  g.x.resize(npts);
  for (int i = 0; i < npts; ++i) g.x[i] = g.lo + i * g.dx;
  return g;
}

std::vector<double> mixture_density_on_grid(const MixtureSpec& m, const Grid& g) {
  std::vector<double> f(g.x.size());
  for (std::size_t i = 0; i < g.x.size(); ++i) f[i] = m.pdf(g.x[i]);
  return f;
}

double total_variation(const MixtureSpec& f, const Grid& g, const std::vector<double>& fhat) {
  if (fhat.size() != g.x.size())
    throw std::invalid_argument("total_variation: estimate length disagrees with grid");
  if (g.x.size() < 2) throw std::invalid_argument("total_variation: degenerate grid");
  if (f.cdf(g.hi) - f.cdf(g.lo) < 1.0 - 1e-6)
    throw std::invalid_argument("total_variation: grid does not cover the reference density's mass");
  double acc = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    const double a = std::abs(f.pdf(g.x[i]) - fhat[i]);
    acc += (i == 0 || i + 1 == g.x.size()) ? 0.5 * a : a;
  }
  return 0.5 * acc * g.dx;
}

void DensityAccumulator::add(const std::vector<int>& counts,
                             const std::vector<GaussComponent>& comps) {
  if (counts.size() != comps.size())
    throw std::invalid_argument("DensityAccumulator: counts/components size mismatch");
  long n = 0;
  for (int c : counts) n += c;
  if (n <= 0) throw std::invalid_argument("DensityAccumulator: empty state");
  for (std::size_t i = 0; i < grid_.x.size(); ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < comps.size(); ++j)
      d += (static_cast<double>(counts[j]) / static_cast<double>(n)) *
           std::exp(log_gauss(grid_.x[i], comps[j]));
    sum_[i] += d;
  }
  ++iters_;
}

std::vector<double> DensityAccumulator::average() const {
  if (iters_ == 0) throw std::runtime_error("DensityAccumulator: no iterations accumulated");
  std::vector<double> out(sum_.size());
  for (std::size_t i = 0; i < sum_.size(); ++i) out[i] = sum_[i] / static_cast<double>(iters_);
  return out;
}

namespace {

// Enumerates least-element allocation vectors recursively, calling visit with
// each complete vector.
template <typename F>
void enumerate_rgs(int n, F&& visit) {
  std::vector<int> d(n, 1);
  auto rec = [&](auto&& self, int i, int kmax) -> void {
    if (i == n) {
      visit(d);
      return;
    }
    for (int v = 1; v <= kmax + 1; ++v) {
      d[i] = v;
      self(self, i + 1, std::max(kmax, v));
    }
  };
  rec(rec, 1, 1);
}

// log of the DP/PY sequential-prediction prior probability of d.
double log_partition_prior(const std::vector<int>& d, const MixingPrior& prior) {
  std::vector<int> sizes;
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int lab = d[i];
    if (i == 0) {
      sizes.push_back(1);
      continue;
    }
    const double denom = prior.beta + static_cast<double>(i);
    if (lab <= static_cast<int>(sizes.size())) {
      acc += std::log((sizes[lab - 1] - prior.sigma) / denom);
      ++sizes[lab - 1];
    } else {
      const double k = static_cast<double>(sizes.size());
      acc += std::log((prior.beta + k * prior.sigma) / denom);
      sizes.push_back(1);
    }
  }
  return acc;
}

std::map<std::string, double> normalize_log_map(std::map<std::string, double>& logs) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& [key, v] : logs) m = std::max(m, v);
  double z = 0.0;
  for (const auto& [key, v] : logs) z += std::exp(v - m);
  std::map<std::string, double> out;
  for (const auto& [key, v] : logs) out[key] = std::exp(v - m) / z;
  return out;
}

}  // namespace

std::map<std::string, double> exact_partition_prior(int n, const MixingPrior& prior) {
  prior.validate();
  if (!prior.size_biased())
    throw std::invalid_argument("exact_partition_prior: requires a DP or PY prior");
  if (n < 1 || n > 8) throw std::invalid_argument("exact_partition_prior: n must lie in [1,8]");
  std::map<std::string, double> logs;
  enumerate_rgs(n, [&](const std::vector<int>& d) {
    logs[partition_signature(d)] = log_partition_prior(d, prior);
  });
  return normalize_log_map(logs);
}

std::map<std::string, double> exact_partition_posterior(const std::vector<double>& y,
                                                        const MixingPrior& prior,
                                                        const NormalGammaBase& base) {
  prior.validate();
  base.validate();
  if (!prior.size_biased())
    throw std::invalid_argument("exact_partition_posterior: requires a DP or PY prior");
  const int n = static_cast<int>(y.size());
  if (n < 1 || n > 8)
    throw std::invalid_argument("exact_partition_posterior: data size must lie in [1,8]");
  std::map<std::string, double> logs;
  enumerate_rgs(n, [&](const std::vector<int>& d) {
    int k = 0;
    for (int v : d) k = std::max(k, v);
    std::vector<BlockStats> stats(k);
    for (int i = 0; i < n; ++i) stats[d[i] - 1].add(y[i]);
    double logp = log_partition_prior(d, prior);
    for (const BlockStats& s : stats) logp += log_marginal_likelihood(base, s);
    logs[partition_signature(d)] = logp;
  });
  return normalize_log_map(logs);
}

double partition_tv(const std::map<std::string, double>& a,
                    const std::map<std::string, double>& b) {
  double acc = 0.0;
  for (const auto& [key, pa] : a) {
    const auto it = b.find(key);
    acc += std::abs(pa - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [key, pb] : b)
    if (a.find(key) == a.end()) acc += pb;
  return 0.5 * acc;
}

double reg_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("reg_incomplete_beta: bad shape");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // Continued fraction (modified Lentz), symmetrized for convergence.
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - reg_incomplete_beta(b, a, 1.0 - x);
  const double lead = std::exp(a * std::log(x) + b * std::log1p(-x) + std::lgamma(a + b) -
                               std::lgamma(a) - std::lgamma(b)) /
                      a;
  const double tiny = 1e-300;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return lead * h;
}

double student_t_upper_tail(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("student_t_upper_tail: df must be positive");
  const double x = df / (df + t * t);
  const double half = 0.5 * reg_incomplete_beta(0.5 * df, 0.5, x);
  return t >= 0.0 ? half : 1.0 - half;
}

PairedTTest paired_one_sided(const std::vector<double>& with_values,
                             const std::vector<double>& without_values) {
  if (with_values.size() != without_values.size())
    throw std::invalid_argument("paired_one_sided: size mismatch");
  const long n = static_cast<long>(with_values.size());
  if (n < 2) throw std::invalid_argument("paired_one_sided: need at least 2 pairs");
  std::vector<double> d(n);
  for (long i = 0; i < n; ++i) d[i] = without_values[i] - with_values[i];
  const double m = series_mean(d);
  double var = 0.0;
  for (double v : d) var += (v - m) * (v - m);
  var /= static_cast<double>(n - 1);
  PairedTTest r;
  r.n = n;
  r.mean_diff = m;
  if (var <= 0.0) {
    r.tstat = m > 0.0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
    r.pvalue = m > 0.0 ? 0.0 : 1.0;
    return r;
  }
  r.tstat = m / std::sqrt(var / static_cast<double>(n));
  r.pvalue = student_t_upper_tail(r.tstat, static_cast<double>(n - 1));
  return r;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << "iter,k_n,deviance,partition,wall_ns\n";
  char buf[64];
  for (const TraceRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.deviance);
    out << r.iter << ',' << r.k << ',' << buf << ',' << r.partition << ',' << r.wall_ns << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": missing header");
  if (line != "iter,k_n,deviance,partition,wall_ns")
    throw std::runtime_error(path + ": unexpected header: " + line);
  std::vector<TraceRow> rows;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string f[5];
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(ss, f[i], ','))
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": short row");
    }
    TraceRow r;
    r.iter = std::stol(f[0]);
    r.k = std::stoi(f[1]);
    r.deviance = std::stod(f[2]);
    r.partition = f[3];
    r.wall_ns = std::stoll(f[4]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace oasmix
