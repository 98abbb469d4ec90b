#pragma once

// JSON forms of the configuration and report types. Complex numbers are a
// bare number or [re, im]; polynomial coefficients are lowest degree first.
// Sector openings in JSON are full angles (twice the half-opening). Derived
// quantities (kappa, kernel growth constants when absent) are recomputed on
// input. Malformed input throws InvalidArgument.

#include <string>

#include <json.hpp>

#include "qgevrey/asymptotics.hpp"
#include "qgevrey/cocycle.hpp"
#include "qgevrey/equation.hpp"
#include "qgevrey/geometry.hpp"
#include "qgevrey/model.hpp"
#include "qgevrey/qlaplace.hpp"

namespace qgevrey {

using json = nlohmann::json;

json read_json_file(const std::string& path);

cplx complex_from_json(const json& j);
json to_json(cplx z);

QFrame frame_from_json(const json& j);
json to_json(const QFrame& f);

Sector sector_from_json(const json& j);
json to_json(const Sector& s);

Polynomial polynomial_from_json(const json& j);
json to_json(const Polynomial& p);

Kernel kernel_from_json(const json& j, const QFrame& frame);
json to_json(const Kernel& k);

/// Kernels without a "growth" object are calibrated against the scenario.
Scenario scenario_from_json(const json& j);
json to_json(const Scenario& sc);

EquationSpec equation_from_json(const json& j);
json to_json(const EquationSpec& e);

json to_json(const HypothesisReport& r);
json to_json(const GevreyFit& f);
json to_json(const RateFit& f);
json to_json(const SplitReport& r);
json to_json(const QLaplaceResult& r);
json to_json(const FourierResult& r);
json to_json(const CoveringReport& r);
json to_json(const FunctionalBound& b);
json to_json(const TheoremReport& r);

}  // namespace qgevrey
