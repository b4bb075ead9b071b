#pragma once

#include <string>

#include "json.hpp"

#include "vpen/strategies.hpp"

namespace vpen {

/// Fixed CSV header for run traces.
inline constexpr const char* kTraceCsvHeader = "n,phi_value,f_value,infeas,p_k_tau,dual_norm_tau,s_n,evals";

/// Shortest-safe rendering with 17 significant digits.
std::string format_double(double v);

/// One row per iterate; an empty s_n field means no scaling was applied.
std::string trace_to_csv(const RunTrace& trace);

/// outcome, final_x, iterations, total evaluations, plus final f/infeas/tau.
nlohmann::json trace_summary(const RunTrace& trace, const std::string& instance_name);

}  // namespace vpen
