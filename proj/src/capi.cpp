#include "discycle/discycle.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "discycle/bench.hpp"
#include "discycle/discovery.hpp"
#include "discycle/equivalence.hpp"
#include "discycle/errors.hpp"
#include "discycle/io.hpp"
#include "discycle/moments.hpp"
#include "discycle/sem.hpp"

struct dc_graph {
  discycle::DirectedGraph g;
};
struct dc_model {
  discycle::SemParameters params;
};
struct dc_dataset {
  discycle::Dataset data;
};
struct dc_moments {
  discycle::MomentPair m;
};
struct dc_result {
  discycle::DiscoveryResult r;
};

namespace {

thread_local std::string last_error;

dc_status to_status(discycle::ErrorCode code) {
  using discycle::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return DC_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return DC_ERR_PARSE;
    case ErrorCode::Io: return DC_ERR_IO;
    case ErrorCode::SingularSystem: return DC_ERR_SINGULAR_SYSTEM;
    case ErrorCode::IllConditioned: return DC_ERR_ILL_CONDITIONED;
    case ErrorCode::DegenerateDenominator: return DC_ERR_DEGENERATE_DENOMINATOR;
    case ErrorCode::ComplexRoots: return DC_ERR_COMPLEX_ROOTS;
    case ErrorCode::DegenerateVariance: return DC_ERR_DEGENERATE_VARIANCE;
    case ErrorCode::ZeroDivisor: return DC_ERR_ZERO_DIVISOR;
    case ErrorCode::ExponentialBlowup: return DC_ERR_EXPONENTIAL_BLOWUP;
    case ErrorCode::UnstableBothWays: return DC_ERR_UNSTABLE_BOTH_WAYS;
    case ErrorCode::NoStableOrientation: return DC_ERR_NO_STABLE_ORIENTATION;
    case ErrorCode::NonConvergence: return DC_ERR_NON_CONVERGENCE;
  }
  return DC_ERR_INTERNAL;
}

template <class F>
dc_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return DC_OK;
  } catch (const discycle::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return DC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return DC_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw discycle::InvalidArgument(what);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

discycle::TestConfig test_config(const dc_discovery_config* cfg) {
  discycle::TestConfig tc;
  if (cfg) {
    tc.alpha = cfg->alpha;
    tc.tol = cfg->tol;
    tc.center = cfg->center != 0;
    if (cfg->correction) tc.correction = discycle::parse_correction(cfg->correction);
    if (cfg->mode) tc.mode = discycle::parse_mode(cfg->mode);
  }
  tc.validate();
  return tc;
}

}  // namespace

extern "C" {

const char* dc_last_error(void) { return last_error.c_str(); }

const char* dc_status_name(dc_status status) {
  switch (status) {
    case DC_OK: return "ok";
    case DC_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case DC_ERR_PARSE: return "parse";
    case DC_ERR_IO: return "io";
    case DC_ERR_SINGULAR_SYSTEM: return "singular_system";
    case DC_ERR_ILL_CONDITIONED: return "ill_conditioned";
    case DC_ERR_DEGENERATE_DENOMINATOR: return "degenerate_denominator";
    case DC_ERR_COMPLEX_ROOTS: return "complex_roots";
    case DC_ERR_DEGENERATE_VARIANCE: return "degenerate_variance";
    case DC_ERR_ZERO_DIVISOR: return "zero_divisor";
    case DC_ERR_EXPONENTIAL_BLOWUP: return "exponential_blowup";
    case DC_ERR_UNSTABLE_BOTH_WAYS: return "unstable_both_ways";
    case DC_ERR_NO_STABLE_ORIENTATION: return "no_stable_orientation";
    case DC_ERR_NON_CONVERGENCE: return "non_convergence";
    case DC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

int dc_status_is_numerical(dc_status status) {
  switch (status) {
    case DC_OK:
    case DC_ERR_INVALID_ARGUMENT:
    case DC_ERR_PARSE:
    case DC_ERR_IO:
      return 0;
    default:
      return 1;
  }
}

void dc_string_free(char* s) { std::free(s); }

dc_status dc_read_file(const char* path, char** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = copy_string(discycle::read_file(path));
  });
}

dc_status dc_write_file(const char* path, const char* content) {
  return guarded([&] {
    require(path && content, "null argument");
    discycle::write_file(path, content);
  });
}

dc_status dc_graph_from_json(const char* json, dc_graph** out) {
  return guarded([&] {
    require(json && out, "null argument");
    *out = new dc_graph{discycle::graph_from_json(json)};
  });
}

dc_status dc_graph_to_json(const dc_graph* g, char** out) {
  return guarded([&] {
    require(g && out, "null argument");
    *out = copy_string(discycle::graph_to_json(g->g));
  });
}

int dc_graph_size(const dc_graph* g) { return g ? g->g.size() : 0; }
void dc_graph_free(dc_graph* g) { delete g; }

dc_status dc_model_from_json(const char* json, dc_model** out) {
  return guarded([&] {
    require(json && out, "null argument");
    *out = new dc_model{discycle::model_from_json(json)};
  });
}

dc_status dc_model_to_json(const dc_model* m, char** out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = copy_string(discycle::model_to_json(m->params));
  });
}

dc_status dc_model_graph(const dc_model* m, dc_graph** out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = new dc_graph{m->params.graph};
  });
}

void dc_model_free(dc_model* m) { delete m; }

dc_status dc_simulate(const dc_model* m, const char* dist, int n, uint64_t seed, dc_dataset** out) {
  return guarded([&] {
    require(m && dist && out, "null argument");
    discycle::NoiseSpec noise;
    noise.kind = discycle::parse_noise_kind(dist);
    require(noise.kind != discycle::NoiseKind::CustomTable, "simulate supports mixnorm and gamma noise");
    *out = new dc_dataset{discycle::sample(m->params, noise, n, seed)};
  });
}

dc_status dc_dataset_from_csv(const char* csv, dc_dataset** out) {
  return guarded([&] {
    require(csv && out, "null argument");
    *out = new dc_dataset{discycle::dataset_from_csv(csv)};
  });
}

dc_status dc_dataset_to_csv(const dc_dataset* d, char** out) {
  return guarded([&] {
    require(d && out, "null argument");
    *out = copy_string(discycle::dataset_to_csv(d->data));
  });
}

int dc_dataset_rows(const dc_dataset* d) { return d ? d->data.n() : 0; }
int dc_dataset_cols(const dc_dataset* d) { return d ? d->data.p() : 0; }
void dc_dataset_free(dc_dataset* d) { delete d; }

dc_status dc_moments_from_dataset(const dc_dataset* d, int center, dc_moments** out) {
  return guarded([&] {
    require(d && out, "null argument");
    require(d->data.n() > 0, "dataset has no rows");
    *out = new dc_moments{discycle::sample_moments(d->data, center != 0)};
  });
}

dc_status dc_moments_from_model(const dc_model* m, dc_moments** out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = new dc_moments{discycle::population_moments(m->params)};
  });
}

dc_status dc_moments_from_json(const char* json, dc_moments** out) {
  return guarded([&] {
    require(json && out, "null argument");
    *out = new dc_moments{discycle::moments_from_json(json)};
  });
}

dc_status dc_moments_to_json(const dc_moments* m, char** out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = copy_string(discycle::moments_to_json(m->m));
  });
}

void dc_moments_free(dc_moments* m) { delete m; }

void dc_discovery_config_default(dc_discovery_config* cfg) {
  if (!cfg) return;
  discycle::TestConfig tc;
  cfg->alpha = tc.alpha;
  cfg->correction = "holm";
  cfg->mode = "sample";
  cfg->tol = tc.tol;
  cfg->center = 0;
}

dc_status dc_discover_dataset(const dc_dataset* d, const dc_discovery_config* cfg, dc_result** out) {
  return guarded([&] {
    require(d && out, "null argument");
    *out = new dc_result{discycle::discover(d->data, test_config(cfg))};
  });
}

dc_status dc_discover_moments(const dc_moments* m, const dc_discovery_config* cfg, dc_result** out) {
  return guarded([&] {
    require(m && out, "null argument");
    *out = new dc_result{discycle::discover(m->m, test_config(cfg))};
  });
}

dc_status dc_result_to_json(const dc_result* r, char** out) {
  return guarded([&] {
    require(r && out, "null argument");
    *out = copy_string(discycle::result_to_json(r->r));
  });
}

int dc_result_halted(const dc_result* r) {
  return r && r->r.status == discycle::DiscoveryStatus::HaltedNoSimpleCycle;
}

void dc_result_free(dc_result* r) { delete r; }

dc_status dc_equivalence_class(const dc_graph* g, char** out) {
  return guarded([&] {
    require(g && out, "null argument");
    *out = copy_string(discycle::class_to_json(discycle::equivalence_class(g->g)));
  });
}

dc_status dc_equivalence_class_weighted(const dc_model* m, char** out) {
  return guarded([&] {
    require(m && out, "null argument");
    std::vector<discycle::SemParameters> models;
    for (const auto& pi : discycle::factoring_permutations(m->params.graph))
      models.push_back(discycle::transform_parameters(m->params, pi));
    *out = copy_string(discycle::weighted_class_to_json(models));
  });
}

dc_status dc_bench_run(const dc_bench_config* cfg, char** records_csv, char** summary_csv) {
  return guarded([&] {
    require(cfg && records_csv, "null argument");
    discycle::BenchConfig bc;
    bc.p = cfg->p;
    bc.cycle_size = cfg->cycle_size;
    if (cfg->n_count > 0) {
      require(cfg->n_values != nullptr, "null n_values");
      bc.n_values.assign(cfg->n_values, cfg->n_values + cfg->n_count);
    }
    if (cfg->dist) bc.dist = discycle::parse_noise_kind(cfg->dist);
    bc.reps = cfg->reps;
    bc.seed = cfg->seed;
    if (cfg->alpha_count > 0) {
      require(cfg->alphas != nullptr, "null alphas");
      bc.alphas.assign(cfg->alphas, cfg->alphas + cfg->alpha_count);
    }
    if (cfg->correction_count > 0) {
      require(cfg->corrections != nullptr, "null corrections");
      bc.corrections.clear();
      for (int i = 0; i < cfg->correction_count; ++i)
        bc.corrections.push_back(discycle::parse_correction(cfg->corrections[i]));
    }
    if (cfg->mode) bc.mode = discycle::parse_mode(cfg->mode);
    bc.threads = cfg->threads;
    auto records = discycle::run_benchmark(bc);
    *records_csv = copy_string(discycle::records_csv(records));
    if (summary_csv) *summary_csv = copy_string(discycle::summary_csv(discycle::summarize(records)));
  });
}

dc_status dc_gnuplot_script(const char* summary_path, char** out) {
  return guarded([&] {
    require(summary_path && out, "null argument");
    *out = copy_string(discycle::gnuplot_script(summary_path));
  });
}

}  // extern "C"
