#include "sevgae/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sevgae {

namespace {

double overlap_1d(double a0, double a1, double b0, double b1) {
  return std::min(a1, b1) - std::max(a0, b0);
}

bool interiors_overlap(const Rect& a, const Rect& b) {
  return overlap_1d(a.x0, a.x1, b.x0, b.x1) > 1e-12 &&
         overlap_1d(a.y0, a.y1, b.y0, b.y1) > 1e-12;
}

// Symmetric shrink of both rectangles toward their centers along the axis of
// larger penetration, removing exactly the pairwise overlap.
void split_overlap(Rect& a, Rect& b) {
  double ox = overlap_1d(a.x0, a.x1, b.x0, b.x1);
  double oy = overlap_1d(a.y0, a.y1, b.y0, b.y1);
  if (ox <= 0.0 || oy <= 0.0) return;
  bool along_x = ox <= oy;  // shrink along the axis with smaller overlap
  double half = (along_x ? ox : oy) / 2.0;
  double ca = along_x ? (a.x0 + a.x1) / 2.0 : (a.y0 + a.y1) / 2.0;
  double cb = along_x ? (b.x0 + b.x1) / 2.0 : (b.y0 + b.y1) / 2.0;
  Rect* lo = ca <= cb ? &a : &b;
  Rect* hi = ca <= cb ? &b : &a;
  if (along_x) {
    lo->x1 -= half;
    hi->x0 += half;
    if (lo->x1 < lo->x0) lo->x1 = lo->x0;
    if (hi->x0 > hi->x1) hi->x0 = hi->x1;
  } else {
    lo->y1 -= half;
    hi->y0 += half;
    if (lo->y1 < lo->y0) lo->y1 = lo->y0;
    if (hi->y0 > hi->y1) hi->y0 = hi->y1;
  }
}

// Shared (touching, collinear) boundary interval of two rectangles, as a
// segment; empty() true when they do not touch along a side.
struct SharedSide {
  bool found = false;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // the shared interval
};

SharedSide shared_side(const Rect& a, const Rect& b) {
  SharedSide s;
  const double tol = 1e-9;
  // Vertical contact: a's right on b's left or vice versa.
  if (std::abs(a.x1 - b.x0) < tol || std::abs(b.x1 - a.x0) < tol) {
    double x = std::abs(a.x1 - b.x0) < tol ? a.x1 : b.x1;
    double y0 = std::max(a.y0, b.y0), y1 = std::min(a.y1, b.y1);
    if (y1 - y0 > tol) {
      s = {true, x, y0, x, y1};
    }
  } else if (std::abs(a.y1 - b.y0) < tol || std::abs(b.y1 - a.y0) < tol) {
    double y = std::abs(a.y1 - b.y0) < tol ? a.y1 : b.y1;
    double x0 = std::max(a.x0, b.x0), x1 = std::min(a.x1, b.x1);
    if (x1 - x0 > tol) {
      s = {true, x0, y, x1, y};
    }
  }
  return s;
}

// Split one side segment into k+1 pieces; piece 0 keeps the wall class, the
// remaining pieces carry the sorted non-wall connection types.
void segment_side(std::vector<TaggedSegment>& out, int u, int v,
                  const SharedSide& side, std::vector<int> types,
                  int wall_class) {
  std::sort(types.begin(), types.end());
  int k = static_cast<int>(types.size());
  int pieces = k + 1;
  for (int i = 0; i < pieces; ++i) {
    double t0 = double(i) / pieces, t1 = double(i + 1) / pieces;
    TaggedSegment seg;
    seg.u = u;
    seg.v = v;
    seg.type = i == 0 ? wall_class : types[size_t(i - 1)];
    seg.x0 = side.x0 + (side.x1 - side.x0) * t0;
    seg.y0 = side.y0 + (side.y1 - side.y0) * t0;
    seg.x1 = side.x0 + (side.x1 - side.x0) * t1;
    seg.y1 = side.y0 + (side.y1 - side.y0) * t1;
    out.push_back(seg);
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}

const char* kPalette[] = {"#d9d9d9", "#a6cee3", "#fb9a99", "#b2df8a",
                          "#fdbf6f", "#cab2d6", "#ffff99", "#1f78b4",
                          "#33a02c", "#e31a1c", "#ff7f00", "#6a3d9a",
                          "#b15928", "#8dd3c7", "#bebada", "#fb8072",
                          "#80b1d3", "#fdb462", "#b3de69"};

const char* kStrokeStyle[] = {
    "stroke:#000000;stroke-dasharray:none",     // wall
    "stroke:#8b4513;stroke-dasharray:4,2",      // door
    "stroke:#1e90ff;stroke-dasharray:1,2",      // window
    "stroke:#666666;stroke-dasharray:6,3",      // cased opening
    "stroke:#228b22;stroke-dasharray:2,2",      // fence
    "stroke:#aa00aa;stroke-dasharray:8,2,2,2",  // movable partition
};

}  // namespace

FloorPlanLayout graph_to_plan(const Aamg& g, const RenderConfig& cfg) {
  if (g.n == 0) throw std::invalid_argument("graph_to_plan: empty graph");
  LabelSchema schema = LabelSchema::make(g.schema);
  std::set<int> standard;
  for (const auto& name : cfg.standard_classes) {
    for (int c = 0; c < schema.node_class_count(); ++c)
      if (schema.node_classes[size_t(c)] == name) standard.insert(c);
  }

  FloorPlanLayout out;
  for (int i = 0; i < g.n; ++i)
    if (g.node_class[i] == schema.outdoor_class() && out.outdoor_node < 0)
      out.outdoor_node = i;

  // Steps 1-2 (and 8): centers excluding outdoor, inflated to rectangles
  // with side sqrt(area); standard-area classes get a fixed footprint.
  for (int i = 0; i < g.n; ++i) {
    if (i == out.outdoor_node) continue;
    RoomShape room;
    room.node = i;
    room.standard = standard.count(g.node_class[i]) > 0;
    double half = room.standard
                      ? cfg.standard_size / 2.0
                      : std::max(std::sqrt(std::max(g.node_area[i], 1e-4)) / 2.0,
                                 cfg.standard_size / 2.0);
    double cx = g.node_center[i][0], cy = g.node_center[i][1];
    room.rect = {cx - half, cy - half, cx + half, cy + half};
    out.rooms.push_back(room);
  }

  // Coincident centers would make the overlap bisector undefined; nudge
  // deterministically by room index.
  for (size_t i = 0; i < out.rooms.size(); ++i)
    for (size_t j = i + 1; j < out.rooms.size(); ++j) {
      Rect& a = out.rooms[i].rect;
      Rect& b = out.rooms[j].rect;
      if (std::abs((a.x0 + a.x1) - (b.x0 + b.x1)) < 1e-12 &&
          std::abs((a.y0 + a.y1) - (b.y0 + b.y1)) < 1e-12) {
        double d = 1e-3 * double(j + 1);
        b.x0 += d;
        b.x1 += d;
      }
    }

  // Step 3: resolve overlaps by symmetric shrink; repeat until disjoint.
  for (int pass = 0; pass < 64; ++pass) {
    bool any = false;
    for (size_t i = 0; i < out.rooms.size(); ++i)
      for (size_t j = i + 1; j < out.rooms.size(); ++j)
        if (interiors_overlap(out.rooms[i].rect, out.rooms[j].rect)) {
          split_overlap(out.rooms[i].rect, out.rooms[j].rect);
          any = true;
        }
    if (!any) break;
  }

  // Connection types per interior pair (multi-edges collapsed per type).
  std::map<std::pair<int, int>, std::set<int>> pair_types;
  std::map<int, std::set<int>> outdoor_types;
  for (const auto& e : g.edges) {
    if (e.u == out.outdoor_node || e.v == out.outdoor_node) {
      int other = e.u == out.outdoor_node ? e.v : e.u;
      outdoor_types[other].insert(e.type);
    } else {
      pair_types[{e.u, e.v}].insert(e.type);
    }
  }

  std::map<int, size_t> room_of;
  for (size_t i = 0; i < out.rooms.size(); ++i) room_of[out.rooms[i].node] = i;

  // Step 4: pull connected but non-touching pairs together, capped.
  for (const auto& [pair, types] : pair_types) {
    auto iu = room_of.find(pair.first), iv = room_of.find(pair.second);
    if (iu == room_of.end() || iv == room_of.end()) continue;
    Rect& a = out.rooms[iu->second].rect;
    Rect& b = out.rooms[iv->second].rect;
    if (shared_side(a, b).found) continue;
    double gx = std::max(0.0, std::max(b.x0 - a.x1, a.x0 - b.x1));
    double gy = std::max(0.0, std::max(b.y0 - a.y1, a.y0 - b.y1));
    // Close the smaller positive gap by translating the second rectangle.
    bool move_x = (gx > 0.0 && (gy <= 0.0 || gx <= gy));
    double gap = move_x ? gx : gy;
    if (gap <= 0.0 || gap > cfg.max_displacement) {
      if (gap > 0.0) out.connectors.push_back({pair.first, pair.second});
      continue;
    }
    double dir = move_x ? (b.x0 >= a.x1 ? -1.0 : 1.0)
                        : (b.y0 >= a.y1 ? -1.0 : 1.0);
    if (move_x) {
      b.x0 += dir * gap;
      b.x1 += dir * gap;
    } else {
      b.y0 += dir * gap;
      b.y1 += dir * gap;
    }
    // The translation may create a fresh overlap with a third room; one more
    // shrink pass keeps interiors disjoint.
    for (size_t i = 0; i < out.rooms.size(); ++i)
      if (i != iv->second &&
          interiors_overlap(out.rooms[i].rect, b))
        split_overlap(out.rooms[i].rect, b);
  }

  // Step 4b: the translations can reintroduce overlaps between pairs not
  // touched by the local shrink above; iterate the global shrink again, then
  // snap sub-tolerance residue (shrink truncation, 1-ulp arithmetic) so the
  // interiors end up disjoint exactly.
  for (int pass = 0; pass < 64; ++pass) {
    bool any = false;
    for (size_t i = 0; i < out.rooms.size(); ++i)
      for (size_t j = i + 1; j < out.rooms.size(); ++j)
        if (interiors_overlap(out.rooms[i].rect, out.rooms[j].rect)) {
          split_overlap(out.rooms[i].rect, out.rooms[j].rect);
          any = true;
        }
    if (!any) break;
  }
  for (size_t i = 0; i < out.rooms.size(); ++i)
    for (size_t j = i + 1; j < out.rooms.size(); ++j) {
      Rect& a = out.rooms[i].rect;
      Rect& b = out.rooms[j].rect;
      double ox = overlap_1d(a.x0, a.x1, b.x0, b.x1);
      double oy = overlap_1d(a.y0, a.y1, b.y0, b.y1);
      if (ox <= 0.0 || oy <= 0.0) continue;
      if (ox <= oy) {
        if ((a.x0 + a.x1) / 2.0 <= (b.x0 + b.x1) / 2.0)
          a.x1 = b.x0;  // a sits left of b: retract a onto b's edge
        else
          b.x1 = a.x0;
      } else {
        if ((a.y0 + a.y1) / 2.0 <= (b.y0 + b.y1) / 2.0)
          a.y1 = b.y0;
        else
          b.y1 = a.y0;
      }
    }

  // Steps 5-6: tag shared sides; wall buffering is presentational and is
  // applied at draw time (stroke width).
  int wall = 0;  // wall is class 0 in both schemas
  for (const auto& [pair, types] : pair_types) {
    auto iu = room_of.find(pair.first), iv = room_of.find(pair.second);
    if (iu == room_of.end() || iv == room_of.end()) continue;
    SharedSide side =
        shared_side(out.rooms[iu->second].rect, out.rooms[iv->second].rect);
    if (!side.found) continue;
    std::vector<int> nonwall;
    for (int tp : types)
      if (tp != wall) nonwall.push_back(tp);
    segment_side(out.segments, pair.first, pair.second, side, nonwall, wall);
  }

  // Step 7: outdoor-connected rooms segment the perimeter side nearest the
  // unit-square boundary.
  for (const auto& [node, types] : outdoor_types) {
    auto it = room_of.find(node);
    if (it == room_of.end()) continue;
    const Rect& r = out.rooms[it->second].rect;
    double d_left = r.x0, d_right = 1.0 - r.x1;
    double d_bottom = r.y0, d_top = 1.0 - r.y1;
    double m = std::min({d_left, d_right, d_bottom, d_top});
    SharedSide side;
    side.found = true;
    if (m == d_left) side = {true, r.x0, r.y0, r.x0, r.y1};
    else if (m == d_right) side = {true, r.x1, r.y0, r.x1, r.y1};
    else if (m == d_bottom) side = {true, r.x0, r.y0, r.x1, r.y0};
    else side = {true, r.x0, r.y1, r.x1, r.y1};
    std::vector<int> nonwall;
    for (int tp : types)
      if (tp != wall) nonwall.push_back(tp);
    segment_side(out.segments, node, -1, side, nonwall, wall);
  }
  return out;
}

std::string plan_svg(const FloorPlanLayout& layout, const LabelSchema& schema,
                     const RenderConfig& cfg) {
  (void)schema;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\" "
        "width=\"512\" height=\"512\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"#ffffff\"/>\n";
  for (const auto& room : layout.rooms) {
    const Rect& r = room.rect;
    os << "<rect class=\"room\" x=\"" << fmt(r.x0) << "\" y=\"" << fmt(r.y0)
       << "\" width=\"" << fmt(std::max(0.0, r.width())) << "\" height=\""
       << fmt(std::max(0.0, r.height())) << "\" fill=\"";
    os << kPalette[size_t(room.node) %
                   (sizeof(kPalette) / sizeof(kPalette[0]))];
    os << "\" stroke=\"#333333\" stroke-width=\"" << fmt(cfg.wall_buffer / 2)
       << "\"/>\n";
  }
  for (const auto& s : layout.segments) {
    size_t style = std::min<size_t>(
        size_t(s.type), sizeof(kStrokeStyle) / sizeof(kStrokeStyle[0]) - 1);
    os << "<line class=\"seg\" x1=\"" << fmt(s.x0) << "\" y1=\"" << fmt(s.y0)
       << "\" x2=\"" << fmt(s.x1) << "\" y2=\"" << fmt(s.y1) << "\" style=\""
       << kStrokeStyle[style] << ";stroke-width:" << fmt(cfg.wall_buffer)
       << "\"/>\n";
  }
  for (const auto& c : layout.connectors) {
    os << "<!-- connector " << c.u << " " << c.v << " -->\n";
  }
  // Legend: one marker per stroke style.
  os << "<g class=\"legend\">";
  for (size_t i = 0; i < sizeof(kStrokeStyle) / sizeof(kStrokeStyle[0]); ++i)
    os << "<line x1=\"0.01\" y1=\"" << fmt(0.01 + 0.015 * double(i))
       << "\" x2=\"0.05\" y2=\"" << fmt(0.01 + 0.015 * double(i))
       << "\" style=\"" << kStrokeStyle[i] << ";stroke-width:0.004\"/>";
  os << "</g>\n</svg>\n";
  return os.str();
}

void emit_plan_svg(const FloorPlanLayout& layout, const LabelSchema& schema,
                   const std::string& path, const RenderConfig& cfg) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << plan_svg(layout, schema, cfg);
}

void emit_interpolation_strip(const std::vector<Aamg>& graphs,
                              const std::string& path,
                              const RenderConfig& cfg) {
  if (graphs.size() < 2)
    throw std::invalid_argument("interpolation strip needs >= 2 graphs");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path);
  size_t n = graphs.size();
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << n
     << " 1\" width=\"" << 256 * n << "\" height=\"256\">\n";
  for (size_t i = 0; i < n; ++i) {
    std::string panel;
    if (graphs[i].n > 0) {
      LabelSchema schema = LabelSchema::make(graphs[i].schema);
      panel = plan_svg(graph_to_plan(graphs[i], cfg), schema, cfg);
      // Strip the outer svg element; keep the drawing body.
      auto a = panel.find('\n');
      auto b = panel.rfind("</svg>");
      panel = panel.substr(a + 1, b - a - 1);
    }
    os << "<g class=\"panel\" transform=\"translate(" << i << ",0)\">\n"
       << panel << "</g>\n";
  }
  os << "</svg>\n";
}

Eigen::MatrixXd project_latents(const std::vector<Eigen::RowVectorXd>& codes,
                                const std::string& path) {
  if (codes.size() < 3)
    throw std::invalid_argument("project_latents: need >= 3 codes");
  int n = int(codes.size()), d = int(codes[0].size());
  Eigen::MatrixXd X(n, d);
  for (int i = 0; i < n; ++i) X.row(i) = codes[size_t(i)];
  Eigen::RowVectorXd mu = X.colwise().mean();
  Eigen::MatrixXd C = X.rowwise() - mu;
  Eigen::MatrixXd cov = C.transpose() * C / double(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  // Eigenvalues ascending: take the last two columns, deterministic signs.
  Eigen::MatrixXd basis(d, 2);
  for (int j = 0; j < 2; ++j) {
    Eigen::VectorXd v = es.eigenvectors().col(d - 1 - j);
    int arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    basis.col(j) = v;
  }
  Eigen::MatrixXd pts = C * basis;

  if (!path.empty()) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path);
    double lo = std::min(pts.minCoeff(), -1e-9);
    double hi = std::max(pts.maxCoeff(), 1e-9);
    double span = hi - lo;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\" "
          "width=\"512\" height=\"512\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" "
          "fill=\"#ffffff\"/>\n";
    for (int i = 0; i < n; ++i) {
      double px = (pts(i, 0) - lo) / span * 0.9 + 0.05;
      double py = (pts(i, 1) - lo) / span * 0.9 + 0.05;
      os << "<circle cx=\"" << fmt(px) << "\" cy=\"" << fmt(py)
         << "\" r=\"0.006\" fill=\"#1f78b4\"/>\n";
    }
    os << "</svg>\n";
  }
  return pts;
}

}  // namespace sevgae
