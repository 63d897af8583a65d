#include "discycle/discovery.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "discycle/errors.hpp"

namespace discycle {

std::string status_name(DiscoveryStatus s) {
  return s == DiscoveryStatus::Complete ? "complete" : "halted_no_simple_cycle";
}

DirectedGraph DiscoveryResult::graph() const {
  std::vector<Edge> edges;
  for (int i = 0; i < lambda_hat.rows(); ++i)
    for (int j = 0; j < lambda_hat.cols(); ++j)
      if (lambda_hat(i, j) != 0.0) edges.push_back({i, j});
  return DirectedGraph(static_cast<int>(lambda_hat.rows()), std::move(edges));
}

WorkingSet make_working_set(const Dataset& data, bool center) {
  WorkingSet ws;
  ws.x = center ? center_columns(data).values : data.values;
  Dataset view{ws.x, {}};
  ws.m = sample_moments(view);
  ws.ids.resize(data.p());
  std::iota(ws.ids.begin(), ws.ids.end(), 0);
  return ws;
}

WorkingSet make_working_set(const MomentPair& m) {
  WorkingSet ws;
  ws.m = m;
  ws.ids.resize(m.size());
  std::iota(ws.ids.begin(), ws.ids.end(), 0);
  return ws;
}

void peel(WorkingSet& ws, const VertexSet& c_set, Mode mode) {
  VertexSet rest = complement(ws.size(), c_set);
  if (mode == Mode::Sample) {
    Dataset view{ws.x, {}};
    ws.x = residualize(view, c_set).values;
    ws.m = sample_moments(Dataset{ws.x, {}});
  } else {
    ws.m = residualize_moments(ws.m, c_set);
  }
  std::vector<int> ids;
  for (int v : rest) ids.push_back(ws.ids[v]);
  ws.ids = std::move(ids);
}

namespace {

// Exact-moment decision: the statistic counts as zero when it is small
// relative to the size of the terms it is built from.
bool population_zero(const DeterminantStat& st, const MomentPair& m, double tol) {
  double scale = 0.0;
  for (std::size_t k = 0; k < st.coords.size(); ++k)
    scale += std::abs(st.gradient[k] * st.coords[k].evaluate(m));
  return std::abs(st.value) < tol * std::max(1.0, scale);
}

double moment_scale(const MomentPair& m) {
  double s = m.s.cwiseAbs().maxCoeff();
  for (double v : m.t.data()) s = std::max(s, std::abs(v));
  return std::max(1.0, s);
}

TestRecord run_determinant_test(const WorkingSet& ws, DeterminantKind kind, int u, int v,
                                const TestConfig& cfg) {
  DeterminantStat st = kind == DeterminantKind::D2 ? d2(ws.m, u, v) : d3(ws.m, u, v);
  TestRecord rec;
  rec.kind = kind == DeterminantKind::D2 ? "d2" : "d3";
  rec.indices = {ws.ids[u], ws.ids[v]};
  if (cfg.mode == Mode::Population) {
    rec.statistic = st.value;
    rec.raw_p = population_zero(st, ws.m, cfg.tol) ? 1.0 : 0.0;
    return rec;
  }
  try {
    auto out = delta_test(ws.x, st);
    rec.raw_p = out.p_value;
    rec.statistic = out.statistic;
  } catch (const DegenerateVariance&) {
    // A functional with no sampling variability cannot be declared nonzero.
    rec.kind += "_degenerate";
    rec.raw_p = 1.0;
  }
  return rec;
}

// Population-mode families are exact decisions; corrections do not apply.
void close_family(PValueTable& diag, std::size_t first, const TestConfig& cfg) {
  adjust_family(diag, first, cfg.mode == Mode::Population ? Correction::None : cfg.correction);
}

}  // namespace

Eigen::MatrixXd d2_adjusted_pvalues(const WorkingSet& ws, const TestConfig& cfg, PValueTable& diag) {
  const int k = ws.size();
  const std::size_t first = diag.size();
  std::vector<std::pair<int, int>> order;
  for (int u = 0; u < k; ++u)
    for (int v = 0; v < k; ++v)
      if (u != v) {
        diag.push_back(run_determinant_test(ws, DeterminantKind::D2, u, v, cfg));
        order.emplace_back(u, v);
      }
  close_family(diag, first, cfg);
  Eigen::MatrixXd adj = Eigen::MatrixXd::Ones(k, k);
  for (std::size_t i = 0; i < order.size(); ++i)
    adj(order[i].first, order[i].second) = diag[first + i].adjusted_p;
  return adj;
}

VertexSet find_root_nodes(const Eigen::MatrixXd& d2_adj, const TestConfig& cfg) {
  VertexSet roots;
  for (int r = 0; r < d2_adj.rows(); ++r) {
    bool root = true;
    for (int u = 0; u < d2_adj.cols() && root; ++u)
      if (u != r && d2_adj(r, u) <= cfg.alpha) root = false;
    if (root) roots.push_back(r);
  }
  return roots;
}

namespace {

// Bron-Kerbosch with pivoting; cliques of size >= 2 in lexicographic order.
std::vector<VertexSet> maximal_cliques(const std::vector<std::vector<bool>>& adj) {
  const int k = static_cast<int>(adj.size());
  std::vector<VertexSet> out;
  std::function<void(VertexSet, VertexSet, VertexSet)> expand = [&](VertexSet r, VertexSet p,
                                                                    VertexSet x) {
    if (p.empty() && x.empty()) {
      if (r.size() >= 2) out.push_back(make_vertex_set(r));
      return;
    }
    int pivot = -1;
    std::size_t best = 0;
    for (const VertexSet* s : {&p, &x})
      for (int u : *s) {
        std::size_t cnt = 0;
        for (int v : p) cnt += adj[u][v];
        if (pivot < 0 || cnt > best) pivot = u, best = cnt;
      }
    VertexSet candidates;
    for (int v : p)
      if (!adj[pivot][v]) candidates.push_back(v);
    for (int v : candidates) {
      VertexSet r2 = r, p2, x2;
      r2.push_back(v);
      for (int w : p)
        if (adj[v][w]) p2.push_back(w);
      for (int w : x)
        if (adj[v][w]) x2.push_back(w);
      expand(r2, p2, x2);
      p.erase(std::find(p.begin(), p.end(), v));
      x.push_back(v);
    }
  };
  VertexSet all(k);
  std::iota(all.begin(), all.end(), 0);
  expand({}, all, {});
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<VertexSet> find_candidate_cycles(const WorkingSet& ws, const Eigen::MatrixXd& d2_adj,
                                             const TestConfig& cfg, PValueTable& diag) {
  const int k = ws.size();
  if (k < 2) return {};
  std::vector<std::pair<int, int>> pairs;
  const std::size_t first = diag.size();
  for (int u = 0; u < k; ++u)
    for (int v = u + 1; v < k; ++v) {
      pairs.emplace_back(u, v);
      diag.push_back(run_determinant_test(ws, DeterminantKind::D3, u, v, cfg));
    }
  close_family(diag, first, cfg);

  auto both_d2 = [&](std::size_t i) {
    auto [u, v] = pairs[i];
    return std::max(d2_adj(u, v), d2_adj(v, u));
  };
  auto d3_p = [&](std::size_t i) { return diag[first + i].adjusted_p; };

  std::vector<std::size_t> c2;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (both_d2(i) <= cfg.alpha) c2.push_back(i);
  if (c2.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pairs.size(); ++i)
      if (both_d2(i) < both_d2(best)) best = i;
    c2.push_back(best);
  }
  std::vector<std::size_t> star;
  for (std::size_t i : c2)
    if (d3_p(i) > cfg.alpha) star.push_back(i);
  if (star.empty()) {
    std::size_t best = c2.front();
    for (std::size_t i : c2)
      if (d3_p(i) > d3_p(best)) best = i;
    star.push_back(best);
  }

  std::vector<std::vector<bool>> adj(k, std::vector<bool>(k, false));
  for (std::size_t i : star) {
    auto [u, v] = pairs[i];
    adj[u][v] = adj[v][u] = true;
  }
  return maximal_cliques(adj);
}

std::vector<VertexSet> prune_root_cycles(const WorkingSet& ws, const std::vector<VertexSet>& cands,
                                         const TestConfig& cfg, PValueTable& diag, bool& used_union) {
  used_union = false;
  if (cands.size() <= 1) return cands;
  VertexSet all;
  for (const auto& c : cands) all.insert(all.end(), c.begin(), c.end());
  all = make_vertex_set(all);

  const std::size_t first = diag.size();
  const double scale = moment_scale(ws.m);
  for (const auto& c1 : cands) {
    VertexSet others;
    std::set_difference(all.begin(), all.end(), c1.begin(), c1.end(), std::back_inserter(others));
    TestRecord rec;
    rec.kind = "root_cycle";
    for (int v : c1) rec.indices.push_back(ws.ids[v]);
    if (others.empty()) {
      diag.push_back(rec);
      continue;
    }
    if (cfg.mode == Mode::Population) {
      rec.statistic = root_cycle_statistic(ws.m, c1, others);
      rec.raw_p = rec.statistic < cfg.tol * scale ? 1.0 : 0.0;
    } else {
      try {
        auto out = root_cycle_test(ws.x, c1, others);
        rec.raw_p = out.p_value;
        rec.statistic = out.statistic;
      } catch (const NonConvergence&) {
        rec.kind = "root_cycle_nonconvergence";
        rec.raw_p = 0.0;
      }
    }
    diag.push_back(rec);
  }
  close_family(diag, first, cfg);

  std::vector<VertexSet> kept;
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (diag[first + i].adjusted_p > cfg.alpha) kept.push_back(cands[i]);
  if (kept.empty()) {
    used_union = true;
    return {all};
  }
  // Merge survivors that share a vertex until the sets are disjoint.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < kept.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < kept.size() && !merged; ++j) {
        VertexSet common;
        std::set_intersection(kept[i].begin(), kept[i].end(), kept[j].begin(), kept[j].end(),
                              std::back_inserter(common));
        if (!common.empty()) {
          kept[i].insert(kept[i].end(), kept[j].begin(), kept[j].end());
          kept[i] = make_vertex_set(kept[i]);
          kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
        }
      }
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<int> greedy_cycle_order(const Eigen::MatrixXd& s) {
  const int k = static_cast<int>(s.rows());
  if (k < 2) throw InvalidArgument("a cycle needs at least two vertices");
  if (k == 2) return {0, 1};
  if (!(s.ldlt().rcond() > 1.0 / kMaxCondition))
    throw IllConditioned("cycle covariance is ill-conditioned");
  Eigen::MatrixXd inv = s.ldlt().solve(Eigen::MatrixXd::Identity(k, k));

  std::vector<int> degree(k, 0), comp(k);
  std::iota(comp.begin(), comp.end(), 0);
  std::vector<std::vector<int>> nbr(k);
  auto link = [&](int u, int v) {
    ++degree[u];
    ++degree[v];
    nbr[u].push_back(v);
    nbr[v].push_back(u);
    int from = comp[v], to = comp[u];
    for (int& c : comp)
      if (c == from) c = to;
  };
  for (int step = 0; step < k - 1; ++step) {
    int bu = -1, bv = -1;
    double best = -1.0;
    for (int u = 0; u < k; ++u)
      for (int v = u + 1; v < k; ++v)
        if (degree[u] < 2 && degree[v] < 2 && comp[u] != comp[v] && std::abs(inv(u, v)) > best)
          best = std::abs(inv(u, v)), bu = u, bv = v;
    link(bu, bv);
  }
  std::vector<int> ends;
  for (int u = 0; u < k; ++u)
    if (degree[u] == 1) ends.push_back(u);
  link(ends[0], ends[1]);

  std::vector<int> order{0};
  int prev = 0, cur = std::min(nbr[0][0], nbr[0][1]);
  while (cur != 0) {
    order.push_back(cur);
    int next = nbr[cur][0] == prev ? nbr[cur][1] : nbr[cur][0];
    prev = cur;
    cur = next;
  }
  return order;
}

namespace {

double product(const std::vector<double>& w) {
  return std::accumulate(w.begin(), w.end(), 1.0, std::multiplies<>());
}

}  // namespace

OrientedCycle orient_cycle(const MomentPair& m, const VertexSet& c_set, Mode mode) {
  const int len = static_cast<int>(c_set.size());
  OrientedCycle out;
  if (len < 2) throw InvalidArgument("a cycle needs at least two vertices");
  if (len == 2) {
    const int u = c_set[0], v = c_set[1];
    std::pair<double, double> roots;
    try {
      roots = lambda_two_cycle(m, u, v);
    } catch (const ComplexRoots&) {
      if (mode == Mode::Population) throw;
      auto [a, b, c] = two_cycle_quadratic(m, u, v);
      roots = {-b / (2 * a), -b / (2 * a)};
    }
    if (roots.second == 0.0) throw DegenerateDenominator("two-cycle quadratic has a zero root");
    out.order = {u, v};
    out.weights = {roots.first, 1.0 / roots.second};
    out.stable = std::abs(product(out.weights)) < 1.0;
    return out;
  }

  Eigen::MatrixXd s(len, len);
  for (int a = 0; a < len; ++a)
    for (int b = 0; b < len; ++b)
      s(a, b) = m.s(c_set[a], c_set[b]) / std::sqrt(m.s(c_set[a], c_set[a]) * m.s(c_set[b], c_set[b]));
  std::vector<int> forward;
  for (int pos : greedy_cycle_order(s)) forward.push_back(c_set[pos]);
  std::vector<int> backward{forward[0]};
  for (int i = len - 1; i >= 1; --i) backward.push_back(forward[i]);

  auto weights_for = [&](const std::vector<int>& ord) {
    std::vector<double> w(len);
    for (int i = 0; i < len; ++i)
      w[i] = lambda_from_triple(m, ord[i], ord[(i + 1) % len], ord[(i + 2) % len]);
    return w;
  };
  auto wf = weights_for(forward), wb = weights_for(backward);
  const double pf = std::abs(product(wf)), pb = std::abs(product(wb));
  // Ties go to the orientation whose first edge reaches the smaller label.
  bool take_forward = pf < pb || (pf == pb && forward[1] < backward[1]);
  out.order = take_forward ? forward : backward;
  out.weights = take_forward ? wf : wb;
  out.stable = std::min(pf, pb) < 1.0;
  return out;
}

bool cycle_fits(const MomentPair& m, const OrientedCycle& cyc, double tol) {
  const int len = static_cast<int>(cyc.order.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(len, m.size());
  for (int i = 0; i < len; ++i) {
    b(i, cyc.order[i]) += 1.0;
    const int prev = (i + len - 1) % len;
    b(i, cyc.order[prev]) -= cyc.weights[prev];
  }
  auto noise = transform_moments(m, b);
  const double scale = moment_scale(m);
  for (int i = 0; i < len; ++i) {
    if (!(noise.s(i, i) > tol * scale)) return false;
    for (int j = 0; j < len; ++j)
      if (i != j && !(std::abs(noise.s(i, j)) < tol * scale)) return false;
  }
  for (int c = 0; c < len; ++c)
    for (int bb = 0; bb <= c; ++bb)
      for (int a = 0; a <= bb; ++a)
        if (!(a == bb && bb == c) && !(std::abs(noise.t(a, bb, c)) < tol * scale)) return false;
  return true;
}

namespace {

Component to_component(const WorkingSet& ws, const OrientedCycle& cyc) {
  Component comp;
  for (int v : cyc.order) comp.vertices.push_back(ws.ids[v]);
  comp.weights = cyc.weights;
  return comp;
}

std::string layer_tag(std::size_t layer) { return "layer " + std::to_string(layer + 1) + ": "; }

}  // namespace

Part1Result part1(WorkingSet ws, const TestConfig& cfg) {
  cfg.validate();
  Part1Result out;
  while (ws.size() > 0) {
    const std::size_t li = out.layers.size();
    if (ws.size() == 1) {
      out.layers.push_back({Component{{ws.ids[0]}, {}}});
      break;
    }
    try {
      Eigen::MatrixXd d2_adj = d2_adjusted_pvalues(ws, cfg, out.diagnostics);
      VertexSet roots = find_root_nodes(d2_adj, cfg);
      if (!roots.empty()) {
        Layer layer;
        for (int r : roots) layer.push_back(Component{{ws.ids[r]}, {}});
        out.layers.push_back(std::move(layer));
        peel(ws, roots, cfg.mode);
        continue;
      }

      auto cands = find_candidate_cycles(ws, d2_adj, cfg, out.diagnostics);
      bool used_union = false;
      auto root_sets = prune_root_cycles(ws, cands, cfg, out.diagnostics, used_union);
      if (used_union) out.notes.push_back(layer_tag(li) + "every candidate cycle was rejected; using their union");
      if (root_sets.size() > 1 && root_sets.size() < cands.size())
        out.notes.push_back(layer_tag(li) + std::to_string(root_sets.size()) + " root cycles kept");

      Layer layer;
      VertexSet peeled;
      bool halted = false;
      for (const auto& rs : root_sets) {
        OrientedCycle cyc;
        if (cfg.mode == Mode::Population) {
          try {
            cyc = orient_cycle(ws.m, rs, cfg.mode);
          } catch (const Error& e) {
            out.notes.push_back(layer_tag(li) + "cycle estimation failed: " + e.what());
            halted = true;
            break;
          }
          if (!cycle_fits(ws.m, cyc, cfg.tol)) {
            halted = true;
            break;
          }
        } else {
          cyc = orient_cycle(ws.m, rs, cfg.mode);
        }
        if (!cyc.stable)
          out.notes.push_back(layer_tag(li) + "no stable orientation for a cycle; kept the smaller product");
        layer.push_back(to_component(ws, cyc));
        peeled.insert(peeled.end(), rs.begin(), rs.end());
      }
      if (halted) {
        out.status = DiscoveryStatus::HaltedNoSimpleCycle;
        out.remaining = ws.ids;
        out.notes.push_back(layer_tag(li) + "no further simple cycle can be identified");
        break;
      }
      out.layers.push_back(std::move(layer));
      peel(ws, make_vertex_set(peeled), cfg.mode);
    } catch (const Error& e) {
      throw Error(e.code(), layer_tag(li) + e.what());
    }
  }
  return out;
}

DiscoveryResult part2(Part1Result p1, const WorkingSet& original, const TestConfig& cfg) {
  const int p = original.m.size();
  DiscoveryResult out;
  out.status = p1.status;
  out.layers = std::move(p1.layers);
  out.remaining = std::move(p1.remaining);
  out.diagnostics = std::move(p1.diagnostics);
  out.notes = std::move(p1.notes);
  out.lambda_hat = Eigen::MatrixXd::Zero(p, p);

  for (const auto& layer : out.layers)
    for (const auto& comp : layer) {
      const auto len = comp.vertices.size();
      for (std::size_t i = 0; i < comp.weights.size(); ++i)
        out.lambda_hat(comp.vertices[i], comp.vertices[(i + 1) % len]) = comp.weights[i];
    }

  struct Candidate {
    int c, d;
    double weight;
  };
  std::vector<Candidate> cands;
  const std::size_t first = out.diagnostics.size();
  VertexSet earlier;
  for (std::size_t li = 0; li < out.layers.size(); ++li) {
    try {
      if (!earlier.empty())
        for (const auto& comp : out.layers[li]) {
          const auto& dv = comp.vertices;
          const int len = static_cast<int>(dv.size());
          auto r = regress(original.m, dv, earlier);
          Eigen::MatrixXd ldd = Eigen::MatrixXd::Zero(len, len);
          for (int i = 0; i < static_cast<int>(comp.weights.size()); ++i)
            ldd(i, (i + 1) % len) = comp.weights[i];
          Eigen::MatrixXd lcd = inter_cycle_weights(r.coef, ldd);
          for (int a = 0; a < len; ++a)
            for (std::size_t b = 0; b < earlier.size(); ++b) {
              TestRecord rec;
              rec.kind = "edge";
              rec.indices = {earlier[b], dv[a]};
              const double w = lcd(static_cast<Eigen::Index>(b), a);
              if (cfg.mode == Mode::Population) {
                rec.statistic = w;
                rec.raw_p = std::abs(w) >= cfg.tol ? 0.0 : 1.0;
              } else {
                EdgeTestInput in;
                in.d = dv[a];
                in.c = earlier[b];
                in.parents = earlier;
                in.coef.assign(lcd.col(a).data(), lcd.col(a).data() + lcd.rows());
                if (len > 1) {
                  const int prev = (a + len - 1) % len;
                  in.cycle_parent = dv[prev];
                  in.cycle_coef = comp.weights[prev];
                }
                auto res = edge_test(original.x, in);
                rec.raw_p = res.p_value;
                rec.statistic = res.statistic;
              }
              out.diagnostics.push_back(rec);
              cands.push_back({earlier[b], dv[a], w});
            }
        }
    } catch (const Error& e) {
      throw Error(e.code(), "edges into layer " + std::to_string(li + 1) + ": " + e.what());
    }
    for (const auto& comp : out.layers[li]) earlier.insert(earlier.end(), comp.vertices.begin(), comp.vertices.end());
    earlier = make_vertex_set(earlier);
  }
  close_family(out.diagnostics, first, cfg);
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (out.diagnostics[first + i].adjusted_p <= cfg.alpha)
      out.lambda_hat(cands[i].c, cands[i].d) = cands[i].weight;
  return out;
}

DiscoveryResult discover(const Dataset& data, const TestConfig& cfg) {
  cfg.validate();
  if (cfg.mode == Mode::Sample && data.n() < kMinSampleSize)
    throw InvalidArgument("sample-mode discovery needs at least " + std::to_string(kMinSampleSize) + " rows");
  WorkingSet ws = make_working_set(data, cfg.center);
  if (cfg.mode == Mode::Population) ws.x.resize(0, 0);
  return part2(part1(ws, cfg), ws, cfg);
}

DiscoveryResult discover(const MomentPair& m, const TestConfig& cfg) {
  cfg.validate();
  if (cfg.mode != Mode::Population)
    throw InvalidArgument("moment input supports population mode only");
  WorkingSet ws = make_working_set(m);
  return part2(part1(ws, cfg), ws, cfg);
}

}  // namespace discycle
