#include "vpen/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace vpen {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_to_csv(const RunTrace& trace) {
  std::ostringstream os;
  os << kTraceCsvHeader << '\n';
  for (const auto& r : trace.records) {
    os << r.n << ',' << format_double(r.phi_value) << ',' << format_double(r.f_value) << ','
       << format_double(r.infeas) << ',' << format_double(p_k(r.tau)) << ','
       << format_double(dual_norm(r.tau)) << ',' << (r.s_n ? format_double(*r.s_n) : "") << ','
       << r.subsolver_evals << '\n';
  }
  return os.str();
}

nlohmann::json trace_summary(const RunTrace& trace, const std::string& instance_name) {
  nlohmann::json x = nlohmann::json::array();
  for (Eigen::Index i = 0; i < trace.final_x.size(); ++i) x.push_back(trace.final_x[i]);
  nlohmann::json doc{{"instance", instance_name},
                     {"strategy", strategy_name(trace.strategy)},
                     {"outcome", to_string(trace.outcome)},
                     {"iterations", trace.records.size()},
                     {"total_evaluations", trace.total_evaluations()},
                     {"final_x", std::move(x)}};
  if (!trace.records.empty()) {
    const auto& last = trace.last();
    nlohmann::json tau = nlohmann::json::array();
    for (Eigen::Index i = 0; i < last.tau.coords().size(); ++i) tau.push_back(last.tau.coords()[i]);
    doc["final_f"] = last.f_value;
    doc["final_phi_value"] = last.phi_value;
    doc["final_infeas"] = last.infeas;
    doc["final_tau"] = std::move(tau);
    doc["final_p_k_tau"] = p_k(last.tau);
    doc["final_dual_norm_tau"] = dual_norm(last.tau);
  }
  return doc;
}

}  // namespace vpen
