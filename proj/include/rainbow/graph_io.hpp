#pragma once

#include "rainbow/graph.hpp"

#include <filesystem>
#include <iosfwd>

namespace rainbow {

// Edge-list text format: one edge per line, "u v c" (coloured) or "u v"
// (uncoloured), whitespace separated.  '#' starts a comment.  An optional
// "n <count>" line fixes the vertex count; otherwise n = max label + 1.
// Colours are remapped to 0..C-1 on load, preserving their order.

ColouredGraph parse_coloured_graph(std::istream& in);
ColouredGraph load_coloured_graph(const std::filesystem::path& path);

/// Accepts both two- and three-column lines; colours are ignored.
Graph parse_graph(std::istream& in);
Graph load_graph(const std::filesystem::path& path);

void write_graph(std::ostream& out, const Graph& g);
void write_coloured_graph(std::ostream& out, const ColouredGraph& g);

}  // namespace rainbow
