#pragma once

#include <string>
#include <vector>

#include "qkd/optimizer.hpp"

namespace qkd {

// Fixed-schema CSV emission. Column order is stable, numbers carry 12
// significant digits, probabilities are linear except eps0 and g which are
// serialized as natural logs, so the output is byte-reproducible and auditors
// can recompute eps_tot from any row.

std::string csv_header();
std::string csv_row(Protocol proto, const SweepRow& row);
std::string render_csv(Protocol proto, const std::vector<SweepRow>& rows);

/// "%.12g" formatting used across all emitters.
std::string format_number(double v);

}  // namespace qkd
