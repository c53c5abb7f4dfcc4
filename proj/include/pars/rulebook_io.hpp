#pragma once

#include <string>
#include <string_view>

#include "pars/mining.hpp"

namespace pars {

// Self-describing text document: schema, config, predicate table, and the
// rule list in sorted order. Reals carry 17 significant digits, so the
// output is byte-identical for a fixed input and round-trips exactly.
std::string serialize_rulebook(const RuleBook& rb);
RuleBook parse_rulebook(std::string_view text);

void save_rulebook(const RuleBook& rb, const std::string& path);
RuleBook load_rulebook(const std::string& path);

}  // namespace pars
