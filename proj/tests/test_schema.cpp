#include "doctest.h"
#include "sevgae/schema.hpp"

using namespace sevgae;

TEST_CASE("six-variant vocabulary") {
  auto s = LabelSchema::make(SchemaVariant::Six);
  CHECK(s.node_class_count() == 3);
  CHECK(s.edge_class_count() == 3);
  CHECK(s.node_classes[0] == "outdoor");
  CHECK(s.node_classes[1] == "room");
  CHECK(s.node_classes[2] == "stair");
  CHECK(s.edge_classes[0] == "wall");
  CHECK(s.edge_classes[1] == "door");
  CHECK(s.edge_classes[2] == "window");
  CHECK(s.outdoor_class() == 0);
}

TEST_CASE("twentyfive-variant vocabulary") {
  auto s = LabelSchema::make(SchemaVariant::TwentyFive);
  CHECK(s.node_class_count() == 19);
  CHECK(s.edge_class_count() == 6);
  CHECK(s.node_classes[0] == "outdoor");
  CHECK(s.edge_classes[0] == "wall");
  CHECK(s.node_class_index("lavatory") >= 0);
  CHECK(s.edge_class_index("movable partition") >= 0);
}

TEST_CASE("class lookup") {
  auto s = LabelSchema::make(SchemaVariant::Six);
  CHECK(s.node_class_index("room") == 1);
  CHECK(s.edge_class_index("door") == 1);
  CHECK_THROWS(s.node_class_index("nonexistent"));
}

TEST_CASE("variant string round-trip") {
  CHECK(to_string(SchemaVariant::Six) == "six");
  CHECK(to_string(SchemaVariant::TwentyFive) == "twentyfive");
  CHECK(schema_variant_from_string("six") == SchemaVariant::Six);
  CHECK(schema_variant_from_string("twentyfive") == SchemaVariant::TwentyFive);
}
