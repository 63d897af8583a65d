#include "discycle/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "discycle/equivalence.hpp"
#include "discycle/errors.hpp"

namespace discycle {

void BenchConfig::validate() const {
  if (cycle_size < 2) throw InvalidArgument("cycle size must be at least 2");
  if (p < cycle_size || p % cycle_size != 0)
    throw InvalidArgument("p must be a positive multiple of the cycle size");
  if (n_values.empty()) throw InvalidArgument("at least one sample size is required");
  for (int n : n_values)
    if (n < 1000) throw InvalidArgument("sample sizes must be at least 1000");
  if (reps < 1) throw InvalidArgument("reps must be at least 1");
  if (alphas.empty() || corrections.empty()) throw InvalidArgument("alpha and correction grids must be non-empty");
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (threads < 1) throw InvalidArgument("threads must be at least 1");
  if (dist == NoiseKind::CustomTable) throw InvalidArgument("benchmarks support mixnorm and gamma noise");
}

std::uint64_t replication_seed(std::uint64_t seed, int rep) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(rep)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

BenchModel random_model(const BenchConfig& cfg, std::uint64_t rep_seed) {
  cfg.validate();
  std::mt19937_64 rng(rep_seed);
  std::uniform_real_distribution<double> magnitude(0.5, 0.8), scale(0.8, 1.0), unit(0.0, 1.0);
  const int k = cfg.p / cfg.cycle_size;
  auto member = [&](int c, int i) { return c * cfg.cycle_size + i; };

  std::set<Edge> edges;
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < cfg.cycle_size; ++i)
      edges.insert({member(c, i), member(c, (i + 1) % cfg.cycle_size)});
  std::uniform_int_distribution<int> pick(0, cfg.cycle_size - 1);
  for (int c = 0; c + 1 < k; ++c) {
    int from = member(c, pick(rng));
    edges.insert({from, member(c + 1, pick(rng))});
  }
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      for (int i = 0; i < cfg.cycle_size; ++i)
        for (int j = 0; j < cfg.cycle_size; ++j) {
          Edge e{member(a, i), member(b, j)};
          if (unit(rng) < 0.5) edges.insert(e);
        }

  DirectedGraph g(cfg.p, std::vector<Edge>(edges.begin(), edges.end()));
  std::vector<double> weights;
  for (std::size_t e = 0; e < g.edges().size(); ++e)
    weights.push_back((unit(rng) < 0.5 ? -1.0 : 1.0) * magnitude(rng));

  BenchModel model;
  model.noise.kind = cfg.dist;
  for (int v = 0; v < cfg.p; ++v) model.noise.scales.push_back(scale(rng));
  Eigen::VectorXd omega2, omega3;
  noise_moments(model.noise, model.noise.scales, omega2, omega3);
  model.params = make_parameters(g, weights, omega2, omega3);
  return model;
}

bool ordering_recovered(const DirectedGraph& truth, const DiscoveryResult& result) {
  if (result.status != DiscoveryStatus::Complete) return false;
  const int p = truth.size();
  std::vector<int> layer_of(p, -1);
  std::vector<VertexSet> found;
  for (std::size_t li = 0; li < result.layers.size(); ++li)
    for (const auto& comp : result.layers[li]) {
      for (int v : comp.vertices) {
        if (v < 0 || v >= p || layer_of[v] >= 0) return false;
        layer_of[v] = static_cast<int>(li);
      }
      found.push_back(make_vertex_set(comp.vertices));
    }
  if (std::find(layer_of.begin(), layer_of.end(), -1) != layer_of.end()) return false;
  auto parts = strong_components(truth);
  std::sort(parts.begin(), parts.end());
  std::sort(found.begin(), found.end());
  if (parts != found) return false;
  auto idx = component_index(truth, strong_components(truth));
  for (const auto& e : truth.edges())
    if (idx[e.from] != idx[e.to] && layer_of[e.from] >= layer_of[e.to]) return false;
  return true;
}

namespace {

std::string error_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "error_invalid_argument";
    case ErrorCode::Parse: return "error_parse";
    case ErrorCode::Io: return "error_io";
    case ErrorCode::SingularSystem: return "error_singular_system";
    case ErrorCode::IllConditioned: return "error_ill_conditioned";
    case ErrorCode::DegenerateDenominator: return "error_degenerate_denominator";
    case ErrorCode::ComplexRoots: return "error_complex_roots";
    case ErrorCode::DegenerateVariance: return "error_degenerate_variance";
    case ErrorCode::ZeroDivisor: return "error_zero_divisor";
    case ErrorCode::ExponentialBlowup: return "error_exponential_blowup";
    case ErrorCode::UnstableBothWays: return "error_unstable_both_ways";
    case ErrorCode::NoStableOrientation: return "error_no_stable_orientation";
    case ErrorCode::NonConvergence: return "error_non_convergence";
  }
  return "error";
}

std::vector<BenchRecord> run_replication(const BenchConfig& cfg, int rep) {
  const std::uint64_t rep_seed = replication_seed(cfg.seed, rep);
  BenchModel model = random_model(cfg, rep_seed);
  const WeightedGraph truth{model.params.graph, model.params.lambda};
  std::vector<BenchRecord> out;
  for (std::size_t ni = 0; ni < cfg.n_values.size(); ++ni) {
    const int n = cfg.n_values[ni];
    Dataset data;
    MomentPair exact;
    if (cfg.mode == Mode::Sample)
      data = sample(model.params, model.noise, n, replication_seed(rep_seed, static_cast<int>(ni) + 1));
    else
      exact = population_moments(model.params);
    for (double alpha : cfg.alphas)
      for (Correction corr : cfg.corrections) {
        BenchRecord rec;
        rec.rep = rep;
        rec.n = n;
        rec.p = cfg.p;
        rec.dist = noise_kind_name(cfg.dist);
        rec.alpha = alpha;
        rec.correction = corr;
        TestConfig tc;
        tc.alpha = alpha;
        tc.correction = corr;
        tc.mode = cfg.mode;
        auto start = std::chrono::steady_clock::now();
        try {
          DiscoveryResult res = cfg.mode == Mode::Sample ? discover(data, tc) : discover(exact, tc);
          rec.status = status_name(res.status);
          rec.ordering_ok = ordering_recovered(truth.graph, res);
          rec.correct_pairs = correct_pairs(truth, {res.graph(), res.lambda_hat});
        } catch (const Error& e) {
          rec.status = error_status(e.code());
        }
        rec.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.push_back(rec);
      }
  }
  return out;
}

}  // namespace

std::vector<BenchRecord> run_benchmark(const BenchConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<BenchRecord>> per_rep(cfg.reps);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int rep = next++; rep < cfg.reps; rep = next++) per_rep[rep] = run_replication(cfg, rep);
  };
  const int workers = std::min(cfg.threads, cfg.reps);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::vector<BenchRecord> out;
  for (auto& recs : per_rep) out.insert(out.end(), recs.begin(), recs.end());
  return out;
}

std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records) {
  std::map<std::tuple<int, double, int>, BenchSummary> cells;
  for (const auto& r : records) {
    auto& s = cells[{r.n, r.alpha, static_cast<int>(r.correction)}];
    s.n = r.n;
    s.alpha = r.alpha;
    s.correction = r.correction;
    ++s.reps;
    s.mean_ordering += r.ordering_ok ? 1.0 : 0.0;
    s.mean_correct_pairs += r.correct_pairs;
  }
  std::vector<BenchSummary> out;
  for (auto& [key, s] : cells) {
    s.mean_ordering /= s.reps;
    s.mean_correct_pairs /= s.reps;
    out.push_back(s);
  }
  std::map<int, std::size_t> best;
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto it = best.find(out[i].n);
    auto score = [&](std::size_t j) { return out[j].mean_ordering + out[j].mean_correct_pairs; };
    if (it == best.end() || score(i) > score(it->second)) best[out[i].n] = i;
  }
  for (auto& [n, i] : best) out[i].best = true;
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string records_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream os;
  os << "rep,n,p,dist,alpha,correction,ordering_ok,correct_pairs,runtime_s,status\n";
  for (const auto& r : records)
    os << r.rep << ',' << r.n << ',' << r.p << ',' << r.dist << ',' << fmt(r.alpha) << ','
       << correction_name(r.correction) << ',' << (r.ordering_ok ? 1 : 0) << ',' << fmt(r.correct_pairs)
       << ',' << fmt(r.runtime_s) << ',' << r.status << '\n';
  return os.str();
}

std::string summary_csv(const std::vector<BenchSummary>& summary) {
  std::ostringstream os;
  os << "n,alpha,correction,reps,mean_ordering_ok,mean_correct_pairs,best\n";
  for (const auto& s : summary)
    os << s.n << ',' << fmt(s.alpha) << ',' << correction_name(s.correction) << ',' << s.reps << ','
       << fmt(s.mean_ordering) << ',' << fmt(s.mean_correct_pairs) << ',' << (s.best ? 1 : 0) << '\n';
  return os.str();
}

std::string gnuplot_script(const std::string& summary_path) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set xlabel 'n'\n"
     << "set logscale x\n"
     << "set yrange [0:1]\n"
     << "set terminal pngcairo size 800,500\n"
     << "set output '" << summary_path << ".png'\n"
     << "plot '" << summary_path << "' using 1:5 with linespoints title 'ordering recovered', \\\n"
     << "     '' using 1:6 with linespoints title 'correct pairs'\n";
  return os.str();
}

}  // namespace discycle
