#pragma once

#include <string>
#include <variant>

#include "topodep/model.hpp"

namespace topodep {

// Model files carry one of the three presentations; the "kind" field selects.
using AnyModel = std::variant<StandardModel, PseudoMetricModel, PreorderModel>;

AnyModel load_model_json(const std::string& text);
AnyModel load_model_file(const std::string& path);

// Canonical serializations; dump(load(dump(m))) is byte-identical to dump(m).
std::string dump_model_json(const StandardModel& m);
std::string dump_model_json(const PseudoMetricModel& m);
std::string dump_model_json(const PreorderModel& m);
std::string dump_any_model_json(const AnyModel& m);

// Value-space presentation: per-variable value lists, assignments, open
// families as sorted lists of sorted value lists, and the predicate
// interpretation over value tuples.
std::string dump_concrete_json(const ConcreteModel& cm);

std::string model_kind(const AnyModel& m);

// Every presentation expands to a preorder model for checking.
PreorderModel to_preorder(const AnyModel& m);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace topodep
