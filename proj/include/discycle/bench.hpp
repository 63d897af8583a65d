#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "discycle/discovery.hpp"
#include "discycle/sem.hpp"
#include "discycle/stat_tests.hpp"

namespace discycle {

struct BenchConfig {
  int p = 9;
  int cycle_size = 3;
  std::vector<int> n_values{100000};
  NoiseKind dist = NoiseKind::MixtureNormal;
  int reps = 20;
  std::uint64_t seed = 1;
  std::vector<double> alphas{0.05};
  std::vector<Correction> corrections{Correction::Holm};
  Mode mode = Mode::Sample;
  int threads = 1;

  void validate() const;
};

/// Random model of the simulation study: p / cycle_size cycles on
/// contiguous labels, chained by one guaranteed edge and extra forward edges.
struct BenchModel {
  SemParameters params;
  NoiseSpec noise;
};

BenchModel random_model(const BenchConfig& cfg, std::uint64_t rep_seed);

// Seed of replication `rep`, derived from the configuration seed.
std::uint64_t replication_seed(std::uint64_t seed, int rep);

struct BenchRecord {
  int rep = 0;
  int n = 0;
  int p = 0;
  std::string dist;
  double alpha = 0.0;
  Correction correction = Correction::Holm;
  bool ordering_ok = false;
  double correct_pairs = 0.0;
  double runtime_s = 0.0;
  std::string status;
};

/// True when the estimated components are exactly the true strong
/// components and every true edge between components points to a strictly
/// later layer.
bool ordering_recovered(const DirectedGraph& truth, const DiscoveryResult& result);

std::vector<BenchRecord> run_benchmark(const BenchConfig& cfg);

struct BenchSummary {
  int n = 0;
  double alpha = 0.0;
  Correction correction = Correction::Holm;
  int reps = 0;
  double mean_ordering = 0.0;
  double mean_correct_pairs = 0.0;
  bool best = false;  // argmax of mean_ordering + mean_correct_pairs for this n
};

std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records);

std::string records_csv(const std::vector<BenchRecord>& records);
std::string summary_csv(const std::vector<BenchSummary>& summary);
// gnuplot script plotting mean correct pairs against n from a summary CSV.
std::string gnuplot_script(const std::string& summary_path);

}  // namespace discycle
