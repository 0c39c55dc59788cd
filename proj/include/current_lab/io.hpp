#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "current_lab/distribution.hpp"
#include "current_lab/gff.hpp"
#include "current_lab/network.hpp"

namespace current_lab {

/// Network JSON:
///   {"vertices": 3, "edges": [[0,1],[1,2]], "beta": [0.5, 0.5],
///    "pinning": {"vertex": 0, "conductance": 2.0}}
/// "pinning" may be omitted or null. A scalar "beta" applies to every edge.
Network network_from_json(const nlohmann::json& j);
nlohmann::json network_to_json(const Network& net);

/// Reads and validates a network file. Errors carry the path and, for
/// syntax errors, the line and column.
Network load_network(const std::filesystem::path& path);

/// Parses a JSON file, reporting syntax errors with path:line:column.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

/// Dense matrix as CSV preceded by a JSON header line (dimension, pinning).
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m, const Network& net);

/// vertex,h,u,sign
void write_field_csv(std::ostream& out, const FieldSample& field);

/// Shortest round-trip decimal for a double, so CSV bytes are stable.
std::string format_double(double x);

/// Comma-separated vertex permutation, e.g. "2,0,1".
std::vector<std::size_t> parse_order(const std::string& text);

}  // namespace current_lab
