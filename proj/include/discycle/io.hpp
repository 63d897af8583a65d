#pragma once

#include <string>
#include <vector>

#include "discycle/discovery.hpp"
#include "discycle/equivalence.hpp"
#include "discycle/graph.hpp"
#include "discycle/sem.hpp"
#include "discycle/tensor.hpp"

// Interchange formats. Vertices are 1-based in every file.
//   graph:   {"p": 3, "edges": [[1, 2], [2, 3]]}
//   model:   {"p": 3, "edges": [[1, 2, 0.5]], "omega2": [...], "omega3": [...]}
//   moments: {"p": 2, "S": [[...], [...]], "T": [[i, j, k, value], ...]} with i <= j <= k
//   data:    CSV with header X1,...,Xp
namespace discycle {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

DirectedGraph graph_from_json(const std::string& text);
std::string graph_to_json(const DirectedGraph& g);

SemParameters model_from_json(const std::string& text);
std::string model_to_json(const SemParameters& params);

std::string dataset_to_csv(const Dataset& data);
Dataset dataset_from_csv(const std::string& text);

std::string moments_to_json(const MomentPair& m);
MomentPair moments_from_json(const std::string& text);

std::string result_to_json(const DiscoveryResult& result);

// List of graphs; with weights each entry is a model object.
std::string class_to_json(const std::vector<DirectedGraph>& graphs);
std::string weighted_class_to_json(const std::vector<SemParameters>& models);

}  // namespace discycle
