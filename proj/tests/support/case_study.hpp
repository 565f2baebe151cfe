#pragma once

#include <filesystem>
#include <string>

#include "skillroute/models.hpp"
#include "skillroute/routing.hpp"
#include "skillroute/skills.hpp"
#include "skillroute/workflow.hpp"

namespace testing {

inline std::filesystem::path source_dir() { return SKILLROUTE_SOURCE_DIR; }

inline std::filesystem::path case_file(const std::string& name) {
  return source_dir() / "fixtures" / "case_study" / name;
}

/// The shipped case study. `trace_prices` selects the recovered price list
/// instead of the list prices.
inline skillroute::RoutingInputs case_inputs(bool trace_prices = true, double kappa = skillroute::kDefaultKappa) {
  using namespace skillroute;
  const Taxonomy& tax = Taxonomy::canonical();
  RoutingInputs in;
  in.models = load_models(case_file(trace_prices ? "models_trace.json" : "models.json"));
  in.profiles = load_profiles(case_file("profiles.json"), tax, kappa);
  in.workflow = load_workflow(case_file("workflow.json"), tax);
  return in;
}

inline const char* kTC = "Ticket Classification";
inline const char* kKB = "Knowledge Base Search";
inline const char* kTD = "Technical Diagnosis";
inline const char* kRC = "Refund Calculation";
inline const char* kRD = "Response Drafting";
inline const char* kES = "Escalation Summary";

inline const char* kClaude = "Claude-Opus-4.5";
inline const char* kGemini = "Gemini-3-Pro";
inline const char* kGpt = "GPT-5.2";
inline const char* kLlama = "Llama-4-Maverick";
inline const char* kMistral = "Mistral-Small-3.1";

}  // namespace testing
