#include "swapsim/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace swapsim {

namespace {

std::mutex& handler_mutex()
{
    static std::mutex m;
    return m;
}

DiagnosticHandler& handler()
{
    static DiagnosticHandler h = [](const std::string& msg) { std::cerr << "swapsim: " << msg << '\n'; };
    return h;
}

} // namespace

DiagnosticHandler set_diagnostic_handler(DiagnosticHandler h)
{
    std::lock_guard<std::mutex> lock(handler_mutex());
    DiagnosticHandler prev = std::move(handler());
    handler() = std::move(h);
    return prev;
}

void emit_diagnostic(const std::string& message)
{
    std::lock_guard<std::mutex> lock(handler_mutex());
    if (handler())
        handler()(message);
}

} // namespace swapsim
