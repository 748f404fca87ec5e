#pragma once

// JSON file formats: graphs with their encoding, partitions, and designs.
// Output is canonical (sorted keys, shortest round-trip doubles), so equal
// inputs give byte-identical files.

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pairsynth/synth.hpp"

namespace pairsynth {

using Json = nlohmann::json;

/// Malformed input. The message starts with the location (file, JSON
/// pointer, or parser byte offset).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GraphFile {
  ColoredGraph graph;
  Encoding encoding;

  friend bool operator==(const GraphFile&, const GraphFile&) = default;
};

Json graph_to_json(const GraphFile& g);
/// Rejects unknown fields and anything ColoredGraph or Encoding rejects.
GraphFile graph_from_json(const Json& j);

/// {"groups": [{"name": ..., "modes": [[external, internal], ...]}, ...]}
Json partition_to_json(const Partition& p, const ModeSpace& space);
Partition partition_from_json(const Json& j, const ModeSpace& space);

/// Design file: modes, partition, scale, sparse beta_bar, dense unitary
/// blocks, resolution log and diagnostics. Encoding and the target pair
/// matrix are not stored; they come from the graph file at verification.
Json design_to_json(const DeviceDesign& d);
DeviceDesign design_from_json(const Json& j);

Json over_constraint_to_json(const OverConstraintReport& r);

/// Reads and parses a JSON file; errors are reported as ParseError.
Json read_json_file(const std::string& path);
/// Writes `j.dump(2)` followed by a newline.
void write_json_file(const std::string& path, const Json& j);

GraphFile load_graph_file(const std::string& path);
Partition load_partition_file(const std::string& path, const ModeSpace& space);
DeviceDesign load_design_file(const std::string& path);

/// Two-space indent plus trailing newline.
std::string canonical_dump(const Json& j);

}  // namespace pairsynth
