// BPMN 2.0 XML exchange. Export writes the flattened graph of a model; import
// reads any process diagram into a FlatGraph, keeping the supported subset.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mao/flat_graph.hpp"

namespace mao {

class ImportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonBlockStructured : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default-namespace BPMN 2.0, no diagram interchange. Roles and objects are
/// kept in extension attributes. Throws SerializeError for defective models.
std::string export_xml(const ProcessModel& model);

/// Export of an arbitrary flat graph (used when converting imported files).
std::string export_xml(const FlatGraph& graph);

struct ImportResult {
  FlatGraph graph;
  /// One entry per skipped element, merged start/end set and similar.
  std::vector<std::string> warnings;
};

/// Accepts prefixed and default BPMN namespaces. Throws ImportError for
/// malformed XML, a missing process, or a graph without start or end event.
ImportResult import_xml(std::string_view xml);

/// Rebuilds the tree form of a graph made of properly nested split/join
/// pairs. Throws NonBlockStructured otherwise.
ProcessModel to_process_model(const FlatGraph& graph);

}  // namespace mao
