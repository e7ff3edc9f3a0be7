#include "rainbow/graph_io.hpp"

#include "rainbow/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace rainbow {
namespace {

struct RawEdgeList {
  std::optional<int> declared_n;
  std::vector<Edge> edges;
  std::vector<Colour> colours;
  bool any_uncoloured = false;
};

bool parse_int(std::string_view token, long long& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

RawEdgeList read_edge_list(std::istream& in) {
  RawEdgeList raw;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<std::string> tokens;
    for (std::string t; fields >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " + why);
    };
    if (tokens[0] == "n") {
      long long n = 0;
      if (tokens.size() != 2 || !parse_int(tokens[1], n) || n < 0) fail("malformed header");
      if (raw.declared_n) fail("duplicate header");
      raw.declared_n = static_cast<int>(n);
      continue;
    }
    if (tokens.size() < 2 || tokens.size() > 3) fail("expected 'u v' or 'u v c'");
    long long u = 0, v = 0, c = 0;
    if (!parse_int(tokens[0], u) || !parse_int(tokens[1], v) || u < 0 || v < 0) fail("bad vertex");
    if (u == v) fail("self-loop");
    if (tokens.size() == 3) {
      if (!parse_int(tokens[2], c) || c < 0) fail("bad colour");
    } else {
      raw.any_uncoloured = true;
    }
    raw.edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    raw.colours.push_back(static_cast<Colour>(c));
  }
  return raw;
}

int vertex_count(const RawEdgeList& raw) {
  int max_label = -1;
  for (const auto& e : raw.edges) max_label = std::max({max_label, e.u, e.v});
  if (raw.declared_n) {
    if (max_label >= *raw.declared_n)
      throw Error(ErrorKind::InvalidVertex, "vertex " + std::to_string(max_label) + " exceeds header n");
    return *raw.declared_n;
  }
  return max_label + 1;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  return in;
}

}  // namespace

ColouredGraph parse_coloured_graph(std::istream& in) {
  auto raw = read_edge_list(in);
  if (raw.any_uncoloured) throw Error(ErrorKind::ParseError, "coloured graph needs 'u v c' lines");
  int n = vertex_count(raw);
  return ColouredGraph(Graph(n, std::move(raw.edges)), canonical_palette(raw.colours));
}

ColouredGraph load_coloured_graph(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_coloured_graph(in);
}

Graph parse_graph(std::istream& in) {
  auto raw = read_edge_list(in);
  int n = vertex_count(raw);
  return Graph(n, std::move(raw.edges));
}

Graph load_graph(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_graph(in);
}

void write_graph(std::ostream& out, const Graph& g) {
  out << "n " << g.num_vertices() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

void write_coloured_graph(std::ostream& out, const ColouredGraph& g) {
  out << "n " << g.num_vertices() << '\n';
  for (EdgeId id = 0; id < g.num_edges(); ++id) {
    const auto& e = g.graph().edge(id);
    out << e.u << ' ' << e.v << ' ' << g.colour(id) << '\n';
  }
}

}  // namespace rainbow
