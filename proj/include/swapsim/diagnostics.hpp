#pragma once

#include <functional>
#include <string>

namespace swapsim {

using DiagnosticHandler = std::function<void(const std::string&)>;

// Replaces the process-wide diagnostic sink (default: stderr). Pass an empty
// handler to silence diagnostics. Returns the previous handler.
DiagnosticHandler set_diagnostic_handler(DiagnosticHandler handler);

void emit_diagnostic(const std::string& message);

} // namespace swapsim
