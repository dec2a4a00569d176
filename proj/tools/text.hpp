#pragma once

#include <string>

#include "memcell/io.hpp"

namespace memcell::cli {

// Human-readable rendering of a JSON report. Shapes print as tuples and
// complex values as magnitude∠phase (radians).
std::string render_text(const io::Json& report);

}  // namespace memcell::cli
