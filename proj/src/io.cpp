#include "contagion/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "contagion/experiment.hpp"
#include "json.hpp"

namespace contagion {

std::string graph_to_text(const RootedGraph& g) {
  for (int v = 0; v < g.n(); ++v)
    for (int w : g.adj[v])
      if (w == v) throw std::logic_error("graph_to_text: self-loops not representable");
  std::ostringstream os;
  os << g.n() << " " << g.edge_count() << " " << g.root << " " << kind_name(g.kind) << "\n";
  for (int v = 0; v < g.n(); ++v)
    for (int w : g.adj[v])
      if (v < w) os << v << " " << w << "\n";  // parallel edges repeat per copy
  for (auto& c : g.cycles) {
    os << "cycle";
    for (int v : c) os << " " << v;
    os << "\n";
  }
  if (!g.line.empty()) {
    os << "line";
    for (int v : g.line) os << " " << v;
    os << "\n";
  }
  for (auto& [name, set] : g.leaf_sets) {
    os << "set " << name;
    for (int v : set) os << " " << v;
    os << "\n";
  }
  return os.str();
}

RootedGraph graph_from_text(const std::string& text) {
  std::istringstream is(text);
  int n, m, root;
  std::string kind;
  if (!(is >> n >> m >> root >> kind)) throw std::runtime_error("graph text: bad header");
  RootedGraph g;
  g.adj.resize(n);
  g.root = root;
  g.kind = kind_from_name(kind);
  for (int i = 0; i < m; ++i) {
    int u, v;
    if (!(is >> u >> v)) throw std::runtime_error("graph text: missing edge " + std::to_string(i));
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw std::runtime_error("graph text: edge endpoint out of range");
    g.adj[u].push_back(v);
    g.adj[v].push_back(u);
  }
  std::string line_text;
  std::getline(is, line_text);  // finish the last edge line
  while (std::getline(is, line_text)) {
    if (line_text.empty()) continue;
    std::istringstream ls(line_text);
    std::string tag;
    ls >> tag;
    if (tag == "cycle") {
      std::vector<int> c;
      int v;
      while (ls >> v) c.push_back(v);
      g.cycles.push_back(std::move(c));
    } else if (tag == "line") {
      int v;
      while (ls >> v) g.line.push_back(v);
    } else if (tag == "set") {
      std::string name;
      ls >> name;
      int v;
      while (ls >> v) g.leaf_sets[name].push_back(v);
    } else {
      throw std::runtime_error("graph text: unknown section " + tag);
    }
  }
  g.sort_adjacency();
  g.compute_depths();
  return g;
}

std::string block_to_text(const Block& b) {
  RootedGraph g = b.view.g;
  if (b.cycle) g.cycles.push_back(*b.cycle);
  g.leaf_sets["bottom"] = b.bottom_leaves;
  return graph_to_text(g);
}

std::string trajectory_to_csv(const std::vector<Flip>& flips) {
  std::ostringstream os;
  os << "time,vertex,flip\n";
  for (const Flip& f : flips)
    os << format_double(f.time) << "," << f.vertex << "," << (f.on ? 1 : 0) << "\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string exact_result_to_json(const ExactResult& r, double lambda) {
  nlohmann::json j;
  j["lambda"] = format_double(lambda);
  j["R"] = format_double(r.R);
  j["S"] = format_double(r.S);
  j["pi0"] = format_double(r.pi0);
  j["identity_gap"] = format_double(r.identity_gap);
  j["max_residual"] = format_double(r.max_residual);
  for (auto& [l, v] : r.M) j["M"][std::to_string(l)] = format_double(v);
  for (auto& [l, v] : r.Mbar) j["Mbar"][std::to_string(l)] = format_double(v);
  if (r.B >= 0.0) j["B"] = format_double(r.B);
  return j.dump(2) + "\n";
}

}  // namespace contagion
