#pragma once

#include "lradapt/core.hpp"

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace lradapt::cli {

inline constexpr const char* kTraceHeader =
    "iter,epoch,f_before,f_after,phi,delta_f,ratio,eta_before,eta_after,step_norm,flags,R";

/// One header line plus one row per record. Reals use 17 significant digits
/// so read_trace() recovers them bit for bit.
void write_trace(std::ostream& out, std::span<const StepRecord> records);
void write_trace(const std::string& path, std::span<const StepRecord> records);

/// Throws Error(Parse) with the offending line on malformed input.
std::vector<StepRecord> read_trace(std::istream& in);

/// Loss at the final iterate as recorded in the trace: the last row's
/// same-batch re-evaluation when it ran, otherwise its f_before.
double final_loss(std::span<const StepRecord> records);

}  // namespace lradapt::cli
