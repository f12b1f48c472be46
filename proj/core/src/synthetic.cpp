#include "sevgae/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace sevgae {

namespace {

constexpr double kMinRoomSide = 0.05;  // aspect-ratio guard

double overlap_1d(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

bool touches(double a, double b) { return std::abs(a - b) < 1e-12; }

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 step keyed by (seed, index); per-graph streams are
  // independent of generation order.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double shared_boundary(const Rect& a, const Rect& b) {
  if (touches(a.x1, b.x0) || touches(b.x1, a.x0))
    return overlap_1d(a.y0, a.y1, b.y0, b.y1);
  if (touches(a.y1, b.y0) || touches(b.y1, a.y0))
    return overlap_1d(a.x0, a.x1, b.x0, b.x1);
  return 0.0;
}

Aamg generate_layout(const GeneratorConfig& cfg, int index) {
  std::mt19937_64 rng(mix(cfg.seed, static_cast<std::uint64_t>(index)));
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53);
  };
  auto chance = [&](double p) { return uniform(0.0, 1.0) < p; };

  int target = cfg.rooms_min +
               (cfg.rooms_max > cfg.rooms_min
                    ? static_cast<int>(rng() % (cfg.rooms_max - cfg.rooms_min + 1))
                    : 0);

  std::vector<Rect> rooms{Rect{}};
  while (static_cast<int>(rooms.size()) < target) {
    // Split the largest splittable rectangle along its longer axis.
    std::vector<int> order(rooms.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return rooms[a].area() > rooms[b].area(); });
    bool split_done = false;
    for (int idx : order) {
      Rect r = rooms[idx];
      bool along_x = r.width() >= r.height();
      double side = along_x ? r.width() : r.height();
      if (side < 2.0 * kMinRoomSide) continue;
      double lo = kMinRoomSide / side, hi = 1.0 - kMinRoomSide / side;
      double f = uniform(std::max(0.35, lo), std::min(0.65, hi));
      Rect a = r, b = r;
      if (along_x) {
        double cut = r.x0 + f * r.width();
        a.x1 = cut;
        b.x0 = cut;
      } else {
        double cut = r.y0 + f * r.height();
        a.y1 = cut;
        b.y0 = cut;
      }
      rooms[idx] = a;
      rooms.push_back(b);
      split_done = true;
      break;
    }
    if (!split_done) break;  // no rectangle can be split further
  }

  int R = static_cast<int>(rooms.size());
  LabelSchema schema = LabelSchema::make(cfg.schema);
  Aamg g;
  g.id = "g" + std::to_string(index);
  g.schema = cfg.schema;
  g.n = R + 1;  // outdoor node at index 0
  g.node_class.assign(g.n, schema.node_class_index("room"));
  g.node_class[0] = schema.outdoor_class();
  g.node_area.assign(g.n, 0.0);
  g.node_center.assign(g.n, {0.5, 0.5});
  g.node_poly = std::vector<std::vector<std::array<double, 2>>>(g.n);
  (*g.node_poly)[0] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

  // Rare classes go to the smallest rooms.
  std::vector<int> by_area(R);
  std::iota(by_area.begin(), by_area.end(), 0);
  std::sort(by_area.begin(), by_area.end(),
            [&](int a, int b) { return rooms[a].area() < rooms[b].area(); });
  std::vector<std::string> rare =
      cfg.schema == SchemaVariant::Six
          ? std::vector<std::string>{"stair"}
          : std::vector<std::string>{"elevator", "stair", "lavatory", "corridor"};
  for (size_t k = 0; k < rare.size() && k < by_area.size(); ++k) {
    if (chance(0.5))
      g.node_class[by_area[k] + 1] = schema.node_class_index(rare[k]);
  }

  for (int i = 0; i < R; ++i) {
    const Rect& r = rooms[i];
    g.node_area[i + 1] = r.area();
    g.node_center[i + 1] = {(r.x0 + r.x1) / 2.0, (r.y0 + r.y1) / 2.0};
    (*g.node_poly)[i + 1] = {{r.x0, r.y0}, {r.x1, r.y0}, {r.x1, r.y1}, {r.x0, r.y1}};
  }

  int wall = schema.edge_class_index("wall");
  int door = schema.edge_class_index("door");
  int window = schema.edge_class_index("window");
  for (int i = 0; i < R; ++i) {
    for (int j = i + 1; j < R; ++j) {
      if (shared_boundary(rooms[i], rooms[j]) >= cfg.min_shared_wall) {
        g.edges.push_back({i + 1, j + 1, wall});
        if (chance(cfg.door_prob)) g.edges.push_back({i + 1, j + 1, door});
      }
    }
    const Rect& r = rooms[i];
    bool perimeter = touches(r.x0, 0.0) || touches(r.x1, 1.0) ||
                     touches(r.y0, 0.0) || touches(r.y1, 1.0);
    if (perimeter) {
      g.edges.push_back({0, i + 1, wall});
      if (chance(cfg.window_prob)) g.edges.push_back({0, i + 1, window});
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

std::vector<Aamg> generate_corpus(const GeneratorConfig& cfg) {
  if (cfg.rooms_max + 1 > kNodeCapMax)
    throw std::invalid_argument("rooms_max + 1 exceeds n_max");
  std::vector<Aamg> out;
  out.reserve(cfg.count);
  for (int i = 0; i < cfg.count; ++i) out.push_back(generate_layout(cfg, i));
  return out;
}

std::string corpus_line(const Aamg& g) {
  nlohmann::json j;
  j["id"] = g.id;
  j["schema"] = to_string(g.schema);
  j["n"] = g.n;
  j["node_class"] = g.node_class;
  j["node_area"] = g.node_area;
  auto centers = nlohmann::json::array();
  for (const auto& c : g.node_center) centers.push_back({c[0], c[1]});
  j["node_center"] = centers;
  if (g.node_poly) {
    auto polys = nlohmann::json::array();
    for (const auto& poly : *g.node_poly) {
      auto p = nlohmann::json::array();
      for (const auto& v : poly) p.push_back({v[0], v[1]});
      polys.push_back(p);
    }
    j["node_poly"] = polys;
  }
  auto edges = nlohmann::json::array();
  for (const auto& e : g.edges) edges.push_back({e.u, e.v, e.type});
  j["edges"] = edges;
  return j.dump();
}

Aamg parse_corpus_line(const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line);
  Aamg g;
  g.id = j.at("id").get<std::string>();
  g.schema = schema_variant_from_string(j.at("schema").get<std::string>());
  g.n = j.at("n").get<int>();
  g.node_class = j.at("node_class").get<std::vector<int>>();
  g.node_area = j.at("node_area").get<std::vector<double>>();
  for (const auto& c : j.at("node_center"))
    g.node_center.push_back({c.at(0).get<double>(), c.at(1).get<double>()});
  if (j.contains("node_poly")) {
    g.node_poly = std::vector<std::vector<std::array<double, 2>>>{};
    for (const auto& poly : j.at("node_poly")) {
      std::vector<std::array<double, 2>> p;
      for (const auto& v : poly)
        p.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      g.node_poly->push_back(std::move(p));
    }
  }
  for (const auto& e : j.at("edges"))
    g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>()});
  return g;
}

void write_corpus(const std::vector<Aamg>& graphs, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << R"({"format":"aamg-jsonl","version":1})" << "\n";
  for (const auto& g : graphs) f << corpus_line(g) << "\n";
}

std::vector<Aamg> read_corpus(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  int lineno = 0;
  std::vector<Aamg> out;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      if (lineno == 1) {
        nlohmann::json hdr = nlohmann::json::parse(line);
        if (hdr.value("format", "") != "aamg-jsonl" || hdr.value("version", 0) != 1)
          throw std::runtime_error("unknown corpus format header");
        continue;
      }
      out.push_back(parse_corpus_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error("corpus parse error at line " +
                               std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace sevgae
