#include "exactbn/network_io.hpp"

#include <sstream>

#include "exactbn/errors.hpp"
#include "json.hpp"

namespace exactbn {

using nlohmann::json;

std::vector<std::string> default_names(int n) {
  std::vector<std::string> names;
  for (int v = 0; v < n; ++v) names.push_back("V" + std::to_string(v));
  return names;
}

std::string to_json(const NetworkDoc& doc) {
  const int n = doc.network.num_vars();
  json parents = json::array();
  for (int v = 0; v < n; ++v) parents.push_back(doc.network.parents(v).members());
  json out;
  out["format"] = "exactbn-network";
  out["version"] = 1;
  out["n"] = n;
  out["names"] = doc.names.empty() ? default_names(n) : doc.names;
  out["score_spec"] = {{"kind", std::string(to_string(doc.spec.kind))},
                       {"ess", doc.spec.ess},
                       {"precision", static_cast<int>(doc.precision)}};
  out["total_score"] = doc.total_score;
  out["ordering"] = doc.ordering;
  out["parents"] = std::move(parents);
  return out.dump(2) + "\n";
}

NetworkDoc parse_network_doc(const std::string& text) {
  NetworkDoc doc;
  try {
    const json in = json::parse(text);
    if (in.at("format").get<std::string>() != "exactbn-network") throw DataError("not an exactbn network document");
    const int n = in.at("n").get<int>();
    if (n < 1 || n > kMaxVars) throw DataError("network document: bad variable count");
    const auto& parents = in.at("parents");
    if (!parents.is_array() || static_cast<int>(parents.size()) != n) {
      throw DataError("network document: parents list must have one entry per variable");
    }
    std::vector<VarSet> sets(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      for (int p : parents[static_cast<std::size_t>(v)].get<std::vector<int>>()) {
        if (p < 0 || p >= n || p == v) throw DataError("network document: bad parent index");
        sets[static_cast<std::size_t>(v)] = sets[static_cast<std::size_t>(v)].with(p);
      }
    }
    doc.network = Network(std::move(sets));
    if (!doc.network.acyclic()) throw DataError("network document: structure has a cycle");
    doc.names = in.contains("names") ? in["names"].get<std::vector<std::string>>() : default_names(n);
    if (static_cast<int>(doc.names.size()) != n) throw DataError("network document: names list length mismatch");
    if (in.contains("ordering")) {
      doc.ordering = in["ordering"].get<Ordering>();
      check_ordering(doc.ordering, n);
    }
    if (in.contains("score_spec")) {
      const auto& spec = in["score_spec"];
      doc.spec.kind = parse_score_kind(spec.at("kind").get<std::string>());
      doc.spec.ess = spec.value("ess", 1.0);
      doc.precision = spec.value("precision", 4) == 8 ? Precision::kDouble : Precision::kSingle;
    }
    doc.total_score = in.value("total_score", 0.0);
  } catch (const json::exception& e) {
    throw DataError(std::string("network document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("network document: ") + e.what());
  }
  return doc;
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_dot(const Network& net, const std::vector<std::string>& names) {
  const int n = net.num_vars();
  const auto labels = names.empty() ? default_names(n) : names;
  std::ostringstream out;
  out << "digraph bn {\n";
  for (int v = 0; v < n; ++v) out << "  " << quoted(labels[static_cast<std::size_t>(v)]) << ";\n";
  for (int v = 0; v < n; ++v) {
    for (int p : net.parents(v)) {
      out << "  " << quoted(labels[static_cast<std::size_t>(p)]) << " -> " << quoted(labels[static_cast<std::size_t>(v)])
          << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace exactbn
