// Command-line front end. Talks to the library through the C interface only.
#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "discycle/discycle.h"

namespace {

constexpr const char* kFormats = R"(Formats (vertices are 1-based):
  graph JSON    {"p": 3, "edges": [[1, 2], [2, 3]]}
  model JSON    {"p": 3, "edges": [[1, 2, 0.5], ...], "omega2": [1, 1, 1], "omega3": [2, 2, 2]}
                omega2/omega3 are the noise second and third moments.
  data CSV      header X1,...,Xp then one row per sample (17 significant digits)
  moments JSON  {"p": 2, "S": [[s11, s12], [s21, s22]], "T": [[i, j, k, t_ijk], ...]}
                T lists every i <= j <= k once
  result JSON   {"status": "complete" | "halted_no_simple_cycle",
                 "layers": [[{"type": "node" | "cycle", "vertices": [...], "weights": [...]}]],
                 "edges": [[i, j, weight]], "diagnostics": [{"kind", "indices", "raw_p",
                 "adjusted_p", "statistic"}], "remaining": [...] (when halted)}
  bench CSV     rep,n,p,dist,alpha,correction,ordering_ok,correct_pairs,runtime_s,status
Exit codes: 0 success, 1 usage or input error, 2 numerical failure.)";

struct Failure {
  dc_status status;
};

void check(dc_status s) {
  if (s != DC_OK) throw Failure{s};
}

struct StringDeleter {
  void operator()(char* s) const { dc_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

template <class T, void (*Free)(T*)>
struct HandleDeleter {
  void operator()(T* p) const { Free(p); }
};
using Graph = std::unique_ptr<dc_graph, HandleDeleter<dc_graph, dc_graph_free>>;
using Model = std::unique_ptr<dc_model, HandleDeleter<dc_model, dc_model_free>>;
using Data = std::unique_ptr<dc_dataset, HandleDeleter<dc_dataset, dc_dataset_free>>;
using Moments = std::unique_ptr<dc_moments, HandleDeleter<dc_moments, dc_moments_free>>;
using Result = std::unique_ptr<dc_result, HandleDeleter<dc_result, dc_result_free>>;

CString read(const std::string& path) {
  char* text = nullptr;
  check(dc_read_file(path.c_str(), &text));
  return CString(text);
}

void emit(const std::string& path, const char* content) {
  if (path.empty() || path == "-") {
    std::fputs(content, stdout);
    std::fflush(stdout);
    return;
  }
  check(dc_write_file(path.c_str(), content));
}

Model load_model(const std::string& path) {
  dc_model* m = nullptr;
  check(dc_model_from_json(read(path).get(), &m));
  return Model(m);
}

Data load_data(const std::string& path) {
  dc_dataset* d = nullptr;
  check(dc_dataset_from_csv(read(path).get(), &d));
  return Data(d);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal discovery for linear non-Gaussian models with disjoint cycles"};
  app.footer(kFormats);
  app.require_subcommand(1);

  // simulate
  std::string sim_model, sim_dist = "mixnorm", sim_out;
  int sim_n = 0;
  std::uint64_t sim_seed = 1;
  auto* simulate = app.add_subcommand("simulate", "Sample data from a model JSON");
  simulate->add_option("--model", sim_model, "Model JSON")->required();
  simulate->add_option("--dist", sim_dist, "Noise law: mixnorm or gamma")->check(CLI::IsMember({"mixnorm", "gamma"}));
  simulate->add_option("--n", sim_n, "Number of rows")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_seed, "Random seed");
  simulate->add_option("--out", sim_out, "Output CSV (default stdout)");

  // moments
  std::string mom_data, mom_model, mom_out;
  bool mom_center = false;
  auto* moments = app.add_subcommand("moments", "Second and third moments of data or a model");
  auto* mom_data_opt = moments->add_option("--data", mom_data, "Data CSV");
  auto* mom_model_opt = moments->add_option("--model", mom_model, "Model JSON (exact moments)");
  mom_data_opt->excludes(mom_model_opt);
  moments->add_flag("--center", mom_center, "Center the data columns first");
  moments->add_option("--out", mom_out, "Output JSON (default stdout)");

  // discover
  std::string dis_data, dis_moments, dis_mode = "sample", dis_corr = "holm", dis_out;
  double dis_alpha = 0.05, dis_tol = 1e-9;
  bool dis_center = false;
  auto* discover = app.add_subcommand("discover", "Learn the graph and edge weights");
  auto* dis_data_opt = discover->add_option("--data", dis_data, "Data CSV");
  auto* dis_mom_opt = discover->add_option("--moments", dis_moments, "Moments JSON (population mode)");
  dis_data_opt->excludes(dis_mom_opt);
  discover->add_option("--mode", dis_mode, "sample or population")->check(CLI::IsMember({"sample", "population"}));
  discover->add_option("--alpha", dis_alpha, "Test level");
  discover->add_option("--correction", dis_corr, "none, holm or bh")->check(CLI::IsMember({"none", "holm", "bh"}));
  discover->add_option("--tol", dis_tol, "Population-mode zero threshold");
  discover->add_flag("--center", dis_center, "Center the data columns first");
  discover->add_option("--out", dis_out, "Output JSON (default stdout)");

  // equiv
  std::string eq_graph, eq_weights, eq_out;
  auto* equiv = app.add_subcommand("equiv", "Distribution-equivalence class of a graph");
  equiv->add_option("--graph", eq_graph, "Graph JSON")->required();
  equiv->add_option("--weights", eq_weights, "Model JSON on the same graph; adds transformed weights");
  equiv->add_option("--out", eq_out, "Output JSON (default stdout)");

  // bench
  int b_p = 9, b_cs = 3, b_reps = 20, b_threads = 1;
  std::vector<int> b_n{100000};
  std::vector<double> b_alpha{0.05};
  std::vector<std::string> b_corr{"holm"};
  std::string b_dist = "mixnorm", b_mode = "sample", b_out, b_summary, b_gnuplot;
  std::uint64_t b_seed = 1;
  auto* bench = app.add_subcommand("bench", "Replicated simulation study");
  bench->add_option("--p", b_p, "Number of variables");
  bench->add_option("--cycle-size", b_cs, "Cycle length")->check(CLI::IsMember({3, 5}));
  bench->add_option("--dist", b_dist, "mixnorm or gamma")->check(CLI::IsMember({"mixnorm", "gamma"}));
  bench->add_option("--n", b_n, "Sample size (repeatable)")->take_all();
  bench->add_option("--reps", b_reps, "Replications");
  bench->add_option("--seed", b_seed, "Random seed");
  bench->add_option("--alpha", b_alpha, "Test level (repeatable)")->take_all();
  bench->add_option("--correction", b_corr, "none, holm or bh (repeatable)")
      ->take_all()
      ->check(CLI::IsMember({"none", "holm", "bh"}));
  bench->add_option("--mode", b_mode, "sample or population")->check(CLI::IsMember({"sample", "population"}));
  bench->add_option("--threads", b_threads, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--out", b_out, "Per-replication CSV (default stdout)");
  bench->add_option("--summary", b_summary, "Per-cell summary CSV");
  bench->add_option("--gnuplot", b_gnuplot, "Write a gnuplot script for the summary (needs --summary)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) {
      Model m = load_model(sim_model);
      dc_dataset* d = nullptr;
      check(dc_simulate(m.get(), sim_dist.c_str(), sim_n, sim_seed, &d));
      Data data(d);
      char* csv = nullptr;
      check(dc_dataset_to_csv(data.get(), &csv));
      emit(sim_out, CString(csv).get());
    } else if (moments->parsed()) {
      if (mom_data.empty() == mom_model.empty()) {
        std::cerr << "moments: exactly one of --data or --model is required\n";
        return 1;
      }
      dc_moments* mm = nullptr;
      if (!mom_data.empty()) {
        Data data = load_data(mom_data);
        check(dc_moments_from_dataset(data.get(), mom_center, &mm));
      } else {
        Model model = load_model(mom_model);
        check(dc_moments_from_model(model.get(), &mm));
      }
      Moments mo(mm);
      char* json = nullptr;
      check(dc_moments_to_json(mo.get(), &json));
      emit(mom_out, CString(json).get());
    } else if (discover->parsed()) {
      if (dis_data.empty() == dis_moments.empty()) {
        std::cerr << "discover: exactly one of --data or --moments is required\n";
        return 1;
      }
      dc_discovery_config cfg;
      dc_discovery_config_default(&cfg);
      cfg.alpha = dis_alpha;
      cfg.tol = dis_tol;
      cfg.center = dis_center;
      cfg.correction = dis_corr.c_str();
      cfg.mode = dis_mode.c_str();
      dc_result* r = nullptr;
      if (!dis_moments.empty()) {
        if (dis_mode != "population") {
          std::cerr << "discover: --moments requires --mode population\n";
          return 1;
        }
        dc_moments* mm = nullptr;
        check(dc_moments_from_json(read(dis_moments).get(), &mm));
        Moments mo(mm);
        check(dc_discover_moments(mo.get(), &cfg, &r));
      } else {
        Data data = load_data(dis_data);
        check(dc_discover_dataset(data.get(), &cfg, &r));
      }
      Result res(r);
      char* json = nullptr;
      check(dc_result_to_json(res.get(), &json));
      emit(dis_out, CString(json).get());
    } else if (equiv->parsed()) {
      dc_graph* gg = nullptr;
      check(dc_graph_from_json(read(eq_graph).get(), &gg));
      Graph g(gg);
      char* json = nullptr;
      if (!eq_weights.empty()) {
        Model m = load_model(eq_weights);
        dc_graph* mg = nullptr;
        check(dc_model_graph(m.get(), &mg));
        Graph model_graph(mg);
        char* a = nullptr;
        char* b = nullptr;
        check(dc_graph_to_json(g.get(), &a));
        CString ga(a);
        check(dc_graph_to_json(model_graph.get(), &b));
        CString gb(b);
        if (std::string(ga.get()) != gb.get()) {
          std::cerr << "equiv: --weights model is not defined on the --graph graph\n";
          return 1;
        }
        check(dc_equivalence_class_weighted(m.get(), &json));
      } else {
        check(dc_equivalence_class(g.get(), &json));
      }
      emit(eq_out, CString(json).get());
    } else if (bench->parsed()) {
      if (!b_gnuplot.empty() && b_summary.empty()) {
        std::cerr << "bench: --gnuplot needs --summary\n";
        return 1;
      }
      std::vector<const char*> corr;
      for (const auto& c : b_corr) corr.push_back(c.c_str());
      dc_bench_config cfg{b_p,
                          b_cs,
                          b_n.data(),
                          static_cast<int>(b_n.size()),
                          b_dist.c_str(),
                          b_reps,
                          b_seed,
                          b_alpha.data(),
                          static_cast<int>(b_alpha.size()),
                          corr.data(),
                          static_cast<int>(corr.size()),
                          b_mode.c_str(),
                          b_threads};
      char* records = nullptr;
      char* summary = nullptr;
      check(dc_bench_run(&cfg, &records, &summary));
      CString rec(records), sum(summary);
      emit(b_out, rec.get());
      if (!b_summary.empty()) emit(b_summary, sum.get());
      if (!b_gnuplot.empty()) {
        char* script = nullptr;
        check(dc_gnuplot_script(b_summary.c_str(), &script));
        emit(b_gnuplot, CString(script).get());
      }
    }
  } catch (const Failure& f) {
    std::cerr << "error (" << dc_status_name(f.status) << "): " << dc_last_error() << "\n";
    return dc_status_is_numerical(f.status) ? 2 : 1;
  }
  return 0;
}
