#pragma once

#include <string>

#include "interdict/diagnostics.hpp"
#include "interdict/instance.hpp"
#include "interdict/solve.hpp"

namespace interdict {
namespace io {

/// Canonical instance document (schema 1): alphabetically ordered keys,
/// shortest round-trip float formatting; load->save is byte-stable.
std::string to_json(const InterdictionInstance& inst);
InterdictionInstance instance_from_json(const std::string& text);

InterdictionInstance load_instance(const std::string& path);
void save_instance(const InterdictionInstance& inst, const std::string& path);

/// Solve/diagnostics reports share the same serialization family.
std::string report_to_json(const SolveReport& rep, const ValidatedInstance& g);
std::string diagnostics_to_json(const diagnostics::DiagnosticsReport& rep);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace io
}  // namespace interdict
