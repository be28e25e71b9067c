#pragma once

#include <string>
#include <vector>

#include "natlog/database.hpp"
#include "natlog/reader.hpp"

namespace natlog {

// Compiles a `=>` rule into a clause threading a difference list through two
// extra head arguments:
//   noun => @robot.          ~>  noun S0 S1 : eq S0 (robot S1).
//   image => style, subject. ~>  image S0 S2 : style S0 S1, subject S1 S2.
//   e => .                   ~>  e S0 S0.
// Throws Error when a terminal run contains a variable.
Clause translate_rule(const SourceItem& rule, std::string_view origin = {});

} // namespace natlog
