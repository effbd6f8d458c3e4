#pragma once

#include <string>
#include <vector>

#include "exactbn/network.hpp"
#include "exactbn/score_buffer.hpp"
#include "exactbn/scoring.hpp"

namespace exactbn {

/// Contents of a network document.
///
/// The document is a JSON object:
///   format       "exactbn-network"
///   version      1
///   n            variable count
///   names        variable names
///   score_spec   {"kind": "bde"|"bic"|"aic", "ess": number, "precision": 4|8}
///   total_score  network score
///   ordering     ordering the network was built from
///   parents      one ascending list of parent indices per variable
struct NetworkDoc {
  Network network;
  Ordering ordering;
  ScoreSpec spec;
  Precision precision = Precision::kSingle;
  double total_score = 0.0;
  std::vector<std::string> names;
};

/// Names V0..V(n-1).
std::vector<std::string> default_names(int n);

std::string to_json(const NetworkDoc& doc);
/// Throws DataError on malformed documents or cyclic networks.
NetworkDoc parse_network_doc(const std::string& text);

/// Graphviz digraph with one node per variable and one edge per arc.
std::string to_dot(const Network& net, const std::vector<std::string>& names);

}  // namespace exactbn
