#pragma once

#include <string>
#include <vector>

namespace sevgae {

enum class SchemaVariant { Six, TwentyFive };

/// Node/edge label vocabulary. Two fixed variants; the null node class and
/// the no-edge channel are appended by the feature assembler, not listed here.
struct LabelSchema {
  SchemaVariant variant;
  std::vector<std::string> node_classes;
  std::vector<std::string> edge_classes;

  static LabelSchema make(SchemaVariant v);

  int node_class_count() const { return static_cast<int>(node_classes.size()); }
  int edge_class_count() const { return static_cast<int>(edge_classes.size()); }
  int node_class_index(const std::string& name) const;
  int edge_class_index(const std::string& name) const;
  int outdoor_class() const { return 0; }
};

std::string to_string(SchemaVariant v);
SchemaVariant schema_variant_from_string(const std::string& s);

}  // namespace sevgae
