#pragma once

#include <string_view>

namespace posh {

/// Writes a single warning line to stderr unless warnings are silenced.
void log_warning(std::string_view message);

/// Globally enables or disables warning output (tests silence it).
void set_warnings_enabled(bool enabled);

}  // namespace posh
