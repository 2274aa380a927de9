#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "graph.hpp"

namespace mfiso {

struct DataFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ColoredGraph {
  Graph graph;
  std::vector<int> colors;  // raw colors, 0 when absent
};

namespace detail {

inline void g6_encode_n(std::string& out, long n) {
  if (n <= 62) {
    out.push_back(static_cast<char>(n + 63));
  } else if (n <= 258047) {
    out.push_back(126);
    for (int s = 12; s >= 0; s -= 6) out.push_back(static_cast<char>(((n >> s) & 63) + 63));
  } else {
    out.push_back(126);
    out.push_back(126);
    for (int s = 30; s >= 0; s -= 6) out.push_back(static_cast<char>(((n >> s) & 63) + 63));
  }
}

}  // namespace detail

inline std::string to_graph6(const Graph& g) {
  std::string out;
  detail::g6_encode_n(out, g.n());
  int acc = 0, bits = 0;
  for (int j = 1; j < g.n(); ++j)
    for (int i = 0; i < j; ++i) {
      acc = (acc << 1) | (g.has_edge(i, j) ? 1 : 0);
      if (++bits == 6) {
        out.push_back(static_cast<char>(acc + 63));
        acc = bits = 0;
      }
    }
  if (bits > 0) out.push_back(static_cast<char>((acc << (6 - bits)) + 63));
  return out;
}

inline Graph from_graph6(std::string s) {
  if (s.rfind(">>graph6<<", 0) == 0) s = s.substr(10);
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
  for (char c : s)
    if (c < 63 || c > 126) throw DataFormatError("graph6: byte out of range");
  size_t pos = 0;
  auto take = [&]() -> long {
    if (pos >= s.size()) throw DataFormatError("graph6: truncated");
    return s[pos++] - 63;
  };
  long n;
  if (s.empty()) throw DataFormatError("graph6: empty");
  if (s[0] != 126) {
    n = take();
  } else {
    ++pos;
    int k = 3;
    if (pos < s.size() && s[pos] == 126) {
      ++pos;
      k = 6;
    }
    n = 0;
    for (int i = 0; i < k; ++i) n = (n << 6) | take();
  }
  if (n > 1000000) throw DataFormatError("graph6: graph too large");
  size_t need_bits = static_cast<size_t>(n) * (n - 1) / 2;
  size_t need_bytes = (need_bits + 5) / 6;
  if (s.size() - pos != need_bytes) throw DataFormatError("graph6: wrong body length");
  std::vector<std::pair<int, int>> e;
  size_t bit = 0;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i, ++bit) {
      int byte = s[pos + bit / 6] - 63;
      if ((byte >> (5 - bit % 6)) & 1) e.emplace_back(i, j);
    }
  return Graph::from_edges(static_cast<int>(n), e);
}

// Edge list: optional header "n m", lines "u v", optional "c v color"; '#' starts a comment.
inline ColoredGraph parse_edge_list(std::istream& in) {
  std::vector<std::pair<int, int>> e;
  std::vector<std::pair<int, int>> col;
  long n = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    auto num = [&](const std::string& t) {
      try {
        size_t used = 0;
        long v = std::stol(t, &used);
        if (used != t.size() || v < 0) throw DataFormatError("");
        return v;
      } catch (...) {
        throw DataFormatError("edge list line " + std::to_string(lineno) + ": bad integer '" + t + "'");
      }
    };
    if (tok[0] == "c") {
      if (tok.size() != 3) throw DataFormatError("edge list line " + std::to_string(lineno) + ": expected 'c v color'");
      col.emplace_back(static_cast<int>(num(tok[1])), static_cast<int>(num(tok[2])));
      continue;
    }
    if (tok.size() != 2) throw DataFormatError("edge list line " + std::to_string(lineno) + ": expected two fields");
    e.emplace_back(static_cast<int>(num(tok[0])), static_cast<int>(num(tok[1])));
  }
  // The first pair is a header "n m" iff exactly m pairs follow and all ids are below n.
  if (!e.empty()) {
    auto [hn, hm] = e.front();
    bool header = static_cast<long>(e.size()) - 1 == hm;
    for (size_t i = 1; header && i < e.size(); ++i)
      if (e[i].first >= hn || e[i].second >= hn) header = false;
    for (auto [v, c] : col)
      if (header && v >= hn) header = false;
    if (header) {
      n = hn;
      e.erase(e.begin());
    }
  }
  if (n < 0) {
    n = 0;
    for (auto [u, v] : e) n = std::max<long>(n, std::max(u, v) + 1);
    for (auto [v, c] : col) n = std::max<long>(n, v + 1);
  }
  ColoredGraph cg;
  try {
    cg.graph = Graph::from_edges(static_cast<int>(n), e);
  } catch (const InputError& ex) {
    throw DataFormatError(std::string("edge list: ") + ex.what());
  }
  cg.colors.assign(n, 0);
  for (auto [v, c] : col) {
    if (v >= n) throw DataFormatError("edge list: colored vertex out of range");
    cg.colors[v] = c;
  }
  return cg;
}

inline std::string to_edge_list(const Graph& g, const std::vector<int>* colors = nullptr) {
  std::ostringstream o;
  o << g.n() << ' ' << g.m() << '\n';
  for (auto [u, v] : g.edges()) o << u << ' ' << v << '\n';
  if (colors)
    for (int v = 0; v < g.n(); ++v)
      if ((*colors)[v] != 0) o << "c " << v << ' ' << (*colors)[v] << '\n';
  return o.str();
}

inline bool looks_like_graph6(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    return line.find(' ') == std::string::npos && line.find('\t') == std::string::npos;
  }
  return false;
}

// Reads one graph from a file in either format (graph6 detected by content).
inline ColoredGraph read_graph_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataFormatError("cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  std::string text = buf.str();
  if (looks_like_graph6(text)) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty() && line[0] != '#') {
        Graph g = from_graph6(line);
        return {g, std::vector<int>(g.n(), 0)};
      }
  }
  std::istringstream in(text);
  return parse_edge_list(in);
}

inline std::vector<Graph> read_graph6_lines(std::istream& in) {
  std::vector<Graph> r;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    r.push_back(from_graph6(line));
  }
  return r;
}

}  // namespace mfiso
