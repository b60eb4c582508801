#pragma once

#include <string_view>

namespace causal::resources {

/// One-shot demonstration embedded in the ICL prompt, byte-exact.
std::string_view icl_demo();
/// Newline-separated keyword lists used to name benchmark variables.
std::string_view medical_keywords_text();
std::string_view market_keywords_text();

}  // namespace causal::resources
