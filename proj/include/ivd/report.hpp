#pragma once

#include <string>

#include "ivd/classifier.hpp"
#include "json.hpp"

namespace ivd {

// Report serialization with deterministic key order and fixed-precision
// floats (12 significant digits), so identical inputs give byte-identical
// output files.
nlohmann::ordered_json to_json(const ConjugacyReport& rep);
nlohmann::ordered_json to_json(const SmoothnessDiagnostics& diag);
nlohmann::ordered_json to_json(const ProductResult& r);

double round_for_report(double v);
std::string format_report(const nlohmann::ordered_json& j);

}  // namespace ivd
