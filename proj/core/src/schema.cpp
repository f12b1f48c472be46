#include "sevgae/schema.hpp"

#include <algorithm>
#include <stdexcept>

namespace sevgae {

LabelSchema LabelSchema::make(SchemaVariant v) {
  LabelSchema s;
  s.variant = v;
  if (v == SchemaVariant::Six) {
    s.node_classes = {"outdoor", "room", "stair"};
    s.edge_classes = {"wall", "door", "window"};
  } else {
    s.node_classes = {"outdoor",  "room",    "stair",    "corridor", "elevator",
                      "escalator", "facilities", "furniture", "greenery", "ladder",
                      "lavatory", "parking", "pillar",   "pool",     "terrace",
                      "skylight", "slope",   "steps",    "void"};
    s.edge_classes = {"wall", "door", "window", "cased opening", "fence",
                      "movable partition"};
  }
  return s;
}

static int find_index(const std::vector<std::string>& v, const std::string& name) {
  auto it = std::find(v.begin(), v.end(), name);
  if (it == v.end()) throw std::invalid_argument("unknown label: " + name);
  return static_cast<int>(it - v.begin());
}

int LabelSchema::node_class_index(const std::string& name) const {
  return find_index(node_classes, name);
}

int LabelSchema::edge_class_index(const std::string& name) const {
  return find_index(edge_classes, name);
}

std::string to_string(SchemaVariant v) {
  return v == SchemaVariant::Six ? "six" : "twentyfive";
}

SchemaVariant schema_variant_from_string(const std::string& s) {
  if (s == "six") return SchemaVariant::Six;
  if (s == "twentyfive") return SchemaVariant::TwentyFive;
  throw std::invalid_argument("unknown schema variant: " + s);
}

}  // namespace sevgae
