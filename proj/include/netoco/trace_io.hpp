#pragma once

#include <filesystem>
#include <stdexcept>

#include "netoco/oco.hpp"

namespace netoco::harness {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// CSV contract: header 't,loss,cum_loss,comparator_cum_loss,regret,avg_regret',
// one row per round, floats at 17 significant digits, UNIX newlines. Written
// atomically (temp file, then rename).
void emit_trace(const oco::RegretTrace& trace, const std::filesystem::path& path);

oco::RegretTrace parse_trace(const std::filesystem::path& path);

// Recomputes regret = cum_loss - comparator_cum_loss from the file columns;
// returns the worst absolute discrepancy.
double regret_column_discrepancy(const oco::RegretTrace& trace);

}  // namespace netoco::harness
