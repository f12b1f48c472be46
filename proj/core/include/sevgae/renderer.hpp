#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sevgae/synthetic.hpp"

namespace sevgae {

struct TaggedSegment {
  int u = -1, v = -1;   // node pair (v = -1 for outdoor)
  int type = 0;         // edge class index; wall segments use the wall class
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

struct RoomShape {
  int node = 0;  // index into the source graph
  Rect rect;
  bool standard = false;  // fixed-size standard-area class
};

/// Dashed link for pairs that stay non-adjacent after the capped translation.
struct Connector {
  int u = 0, v = 0;
};

struct FloorPlanLayout {
  std::vector<RoomShape> rooms;
  std::vector<TaggedSegment> segments;
  std::vector<Connector> connectors;
  int outdoor_node = -1;  // -1 -> virtual outdoor reference
};

struct RenderConfig {
  double wall_buffer = 0.01;
  double max_displacement = 0.2;
  double standard_size = 0.03;
  /// Classes drawn as fixed-size rectangles; names resolved per schema.
  std::vector<std::string> standard_classes{"stair", "elevator", "escalator",
                                            "ladder", "lavatory"};
};

FloorPlanLayout graph_to_plan(const Aamg& g, const RenderConfig& cfg = {});

std::string plan_svg(const FloorPlanLayout& layout, const LabelSchema& schema,
                     const RenderConfig& cfg = {});
void emit_plan_svg(const FloorPlanLayout& layout, const LabelSchema& schema,
                   const std::string& path, const RenderConfig& cfg = {});

void emit_interpolation_strip(const std::vector<Aamg>& graphs,
                              const std::string& path,
                              const RenderConfig& cfg = {});

/// PCA to 2-D; writes a deterministic scatter SVG and returns coordinates.
Eigen::MatrixXd project_latents(const std::vector<Eigen::RowVectorXd>& codes,
                                const std::string& path);

}  // namespace sevgae
