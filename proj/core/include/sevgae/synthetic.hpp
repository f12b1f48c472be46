#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sevgae/aamg.hpp"

namespace sevgae {

struct GeneratorConfig {
  std::uint64_t seed = 0;
  int count = 1;
  int rooms_min = 3;
  int rooms_max = 30;
  SchemaVariant schema = SchemaVariant::Six;
  double door_prob = 0.6;
  double window_prob = 0.3;
  double min_shared_wall = 0.05;  // tau, fraction of the unit side
};

/// Axis-aligned room rectangle in the unit square.
struct Rect {
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
};

/// Boundary-overlap length between two rectangles (0 when not touching).
double shared_boundary(const Rect& a, const Rect& b);

std::vector<Aamg> generate_corpus(const GeneratorConfig& cfg);
Aamg generate_layout(const GeneratorConfig& cfg, int index);

void write_corpus(const std::vector<Aamg>& graphs, const std::string& path);
std::vector<Aamg> read_corpus(const std::string& path);

std::string corpus_line(const Aamg& g);   // one JSONL record
Aamg parse_corpus_line(const std::string& line);

}  // namespace sevgae
