#pragma once

#include <string>
#include <string_view>

#include "json.hpp"
#include "squish/engine.hpp"

namespace squish {

using Json = nlohmann::json;

/// {dimension, particles:[{m,pos,vel}], springs:[{kind,i,j,rest,ks,kd}], faces:[[i,j,k]]}
Json mesh_to_json(const LayeredBody& body);

/// Snapshot fields flattened into one object; vectors carry spatial_dim components.
Json snapshot_to_json(const Snapshot& snapshot);

Json vec_to_json(const Vec3& v, int spatial_dim);
/// Accepts [x, y] or [x, y, z].
Vec3 vec_from_json(const Json& j);

/// Parses and validates a scenario document. Throws ScenarioError; syntax
/// errors name the line and column.
ScenarioScript parse_scenario(std::string_view text);
BodySpec parse_body_spec(const Json& j);

std::string metrics_csv_header();
std::string metrics_csv_row(const Snapshot& snapshot);

/// Shortest decimal form that round-trips.
std::string format_double(double v);

}  // namespace squish
