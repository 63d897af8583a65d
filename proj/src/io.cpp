#include "discycle/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "discycle/errors.hpp"

namespace discycle {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

namespace {

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

int read_p(const json& j, const char* what) {
  if (!j.is_object() || !j.contains("p") || !j["p"].is_number_integer())
    throw ParseError(std::string(what) + ": missing integer field \"p\"");
  int p = j["p"].get<int>();
  if (p < 1) throw ParseError(std::string(what) + ": \"p\" must be at least 1");
  return p;
}

const json& field(const json& j, const char* name, const char* what) {
  if (!j.contains(name)) throw ParseError(std::string(what) + ": missing field \"" + name + "\"");
  return j[name];
}

// Reads [i, j] or [i, j, weight] entries; the message names the offending edge.
std::vector<Edge> read_edges(const json& list, int p, bool weighted, std::vector<double>* weights) {
  if (!list.is_array()) throw ParseError("\"edges\" must be an array");
  std::vector<Edge> edges;
  for (std::size_t e = 0; e < list.size(); ++e) {
    const json& item = list[e];
    const std::string where = "edge #" + std::to_string(e + 1) + " (" + item.dump() + ")";
    const std::size_t arity = weighted ? 3 : 2;
    if (!item.is_array() || item.size() != arity || !item[0].is_number_integer() ||
        !item[1].is_number_integer() || (weighted && !item[2].is_number()))
      throw ParseError(where + ": expected [from, to" + (weighted ? ", weight]" : "]"));
    int from = item[0].get<int>(), to = item[1].get<int>();
    if (from < 1 || from > p || to < 1 || to > p)
      throw ParseError(where + ": vertex outside 1.." + std::to_string(p));
    if (from == to) throw ParseError(where + ": self-loop");
    edges.push_back({from - 1, to - 1});
    if (weighted) weights->push_back(item[2].get<double>());
  }
  return edges;
}

Eigen::VectorXd read_vector(const json& j, const char* name, int p) {
  const json& v = field(j, name, "model");
  if (!v.is_array() || static_cast<int>(v.size()) != p)
    throw ParseError(std::string("model: \"") + name + "\" needs " + std::to_string(p) + " numbers");
  Eigen::VectorXd out(p);
  for (int i = 0; i < p; ++i) {
    if (!v[i].is_number()) throw ParseError(std::string("model: \"") + name + "\" has a non-number");
    out(i) = v[i].get<double>();
  }
  return out;
}

json vertices_json(const std::vector<int>& vs) {
  json out = json::array();
  for (int v : vs) out.push_back(v + 1);
  return out;
}

}  // namespace

DirectedGraph graph_from_json(const std::string& text) {
  json j = parse(text, "graph");
  int p = read_p(j, "graph");
  auto edges = read_edges(field(j, "edges", "graph"), p, false, nullptr);
  try {
    return DirectedGraph(p, std::move(edges));
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("graph: ") + e.what());
  }
}

std::string graph_to_json(const DirectedGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({e.from + 1, e.to + 1});
  return json{{"p", g.size()}, {"edges", edges}}.dump();
}

SemParameters model_from_json(const std::string& text) {
  json j = parse(text, "model");
  int p = read_p(j, "model");
  std::vector<double> weights;
  auto edges = read_edges(field(j, "edges", "model"), p, true, &weights);
  Eigen::VectorXd omega2 = read_vector(j, "omega2", p), omega3 = read_vector(j, "omega3", p);
  try {
    return make_parameters(DirectedGraph(p, std::move(edges)), weights, omega2, omega3);
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

namespace {

json model_json(const SemParameters& params) {
  json edges = json::array();
  for (const auto& e : params.graph.edges())
    edges.push_back({e.from + 1, e.to + 1, params.lambda(e.from, e.to)});
  json o2 = json::array(), o3 = json::array();
  for (int i = 0; i < params.graph.size(); ++i) {
    o2.push_back(params.omega2(i));
    o3.push_back(params.omega3(i));
  }
  return json{{"p", params.graph.size()}, {"edges", edges}, {"omega2", o2}, {"omega3", o3}};
}

}  // namespace

std::string model_to_json(const SemParameters& params) { return model_json(params).dump(); }

std::string dataset_to_csv(const Dataset& data) {
  std::string out;
  auto labels = data.labels.empty() ? default_labels(data.p()) : data.labels;
  for (int j = 0; j < data.p(); ++j) {
    if (j) out += ',';
    out += labels[j];
  }
  out += '\n';
  char buf[32];
  for (int r = 0; r < data.n(); ++r) {
    for (int j = 0; j < data.p(); ++j) {
      if (j) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", data.values(r, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Dataset dataset_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("data: empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Dataset data;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) data.labels.push_back(cell);
  }
  const auto p = data.labels.size();
  if (p == 0) throw ParseError("data: header has no columns");
  std::vector<double> values;
  std::size_t rows = 0, line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t cols = 0;
    const char* s = line.c_str();
    while (true) {
      char* end = nullptr;
      errno = 0;
      double v = std::strtod(s, &end);
      if (end == s || errno == ERANGE || !std::isfinite(v))
        throw ParseError("data: line " + std::to_string(line_no) + ", column " + std::to_string(cols + 1) +
                         " is not a finite number");
      values.push_back(v);
      ++cols;
      if (*end == ',') {
        s = end + 1;
        continue;
      }
      if (*end != '\0')
        throw ParseError("data: line " + std::to_string(line_no) + " has trailing characters");
      break;
    }
    if (cols != p)
      throw ParseError("data: line " + std::to_string(line_no) + " has " + std::to_string(cols) +
                       " values, expected " + std::to_string(p));
    ++rows;
  }
  data.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < p; ++j) data.values(r, j) = values[r * p + j];
  return data;
}

std::string moments_to_json(const MomentPair& m) {
  const int p = m.size();
  json s = json::array(), t = json::array();
  for (int i = 0; i < p; ++i) {
    json row = json::array();
    for (int j = 0; j < p; ++j) row.push_back(m.s(i, j));
    s.push_back(row);
  }
  for (int i = 0; i < p; ++i)
    for (int j = i; j < p; ++j)
      for (int k = j; k < p; ++k) t.push_back({i + 1, j + 1, k + 1, m.t(i, j, k)});
  return json{{"p", p}, {"S", s}, {"T", t}}.dump();
}

MomentPair moments_from_json(const std::string& text) {
  json j = parse(text, "moments");
  const int p = read_p(j, "moments");
  const json& s = field(j, "S", "moments");
  const json& t = field(j, "T", "moments");
  MomentPair m;
  m.s.resize(p, p);
  m.t = SymTensor3(p);
  if (!s.is_array() || static_cast<int>(s.size()) != p)
    throw ParseError("moments: \"S\" must have " + std::to_string(p) + " rows");
  for (int i = 0; i < p; ++i) {
    if (!s[i].is_array() || static_cast<int>(s[i].size()) != p)
      throw ParseError("moments: row " + std::to_string(i + 1) + " of \"S\" has the wrong length");
    for (int k = 0; k < p; ++k) {
      if (!s[i][k].is_number()) throw ParseError("moments: \"S\" has a non-number");
      m.s(i, k) = s[i][k].get<double>();
    }
  }
  if ((m.s - m.s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.s.cwiseAbs().maxCoeff()))
    throw ParseError("moments: \"S\" is not symmetric");
  if (!t.is_array()) throw ParseError("moments: \"T\" must be an array");
  std::vector<bool> seen(SymTensor3::distinct_count(p), false);
  for (std::size_t e = 0; e < t.size(); ++e) {
    const json& item = t[e];
    if (!item.is_array() || item.size() != 4 || !item[3].is_number())
      throw ParseError("moments: \"T\" entry #" + std::to_string(e + 1) + " must be [i, j, k, value]");
    int idx[3];
    for (int a = 0; a < 3; ++a) {
      if (!item[a].is_number_integer() || item[a].get<int>() < 1 || item[a].get<int>() > p)
        throw ParseError("moments: \"T\" entry #" + std::to_string(e + 1) + " has a bad index");
      idx[a] = item[a].get<int>() - 1;
    }
    auto slot = SymTensor3::slot(idx[0], idx[1], idx[2]);
    if (seen[slot]) throw ParseError("moments: \"T\" entry #" + std::to_string(e + 1) + " is a duplicate");
    seen[slot] = true;
    m.t(idx[0], idx[1], idx[2]) = item[3].get<double>();
  }
  for (bool b : seen)
    if (!b) throw ParseError("moments: \"T\" must list every i <= j <= k entry");
  return m;
}

std::string result_to_json(const DiscoveryResult& result) {
  json layers = json::array();
  for (const auto& layer : result.layers) {
    json comps = json::array();
    for (const auto& c : layer) {
      json jc{{"type", c.is_cycle() ? "cycle" : "node"}, {"vertices", vertices_json(c.vertices)}};
      if (c.is_cycle()) jc["weights"] = c.weights;
      comps.push_back(jc);
    }
    layers.push_back(comps);
  }
  json edges = json::array();
  for (int i = 0; i < result.lambda_hat.rows(); ++i)
    for (int k = 0; k < result.lambda_hat.cols(); ++k)
      if (result.lambda_hat(i, k) != 0.0) edges.push_back({i + 1, k + 1, result.lambda_hat(i, k)});
  json diag = json::array();
  for (const auto& r : result.diagnostics)
    diag.push_back({{"kind", r.kind},
                    {"indices", vertices_json(r.indices)},
                    {"raw_p", r.raw_p},
                    {"adjusted_p", r.adjusted_p},
                    {"statistic", r.statistic}});
  json out{{"status", status_name(result.status)}, {"layers", layers}, {"edges", edges}, {"diagnostics", diag}};
  if (result.status != DiscoveryStatus::Complete) out["remaining"] = vertices_json(result.remaining);
  if (!result.notes.empty()) out["notes"] = result.notes;
  return out.dump(2);
}

std::string class_to_json(const std::vector<DirectedGraph>& graphs) {
  json out = json::array();
  for (const auto& g : graphs) out.push_back(json::parse(graph_to_json(g)));
  return out.dump(2);
}

std::string weighted_class_to_json(const std::vector<SemParameters>& models) {
  json out = json::array();
  for (const auto& m : models) out.push_back(model_json(m));
  return out.dump(2);
}

}  // namespace discycle
