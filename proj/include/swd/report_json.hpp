#pragma once
// JSON views of the analysis results. Numbers keep full double precision; keys are
// written in a fixed order so reports are byte-stable.

#include <json.hpp>

#include <span>
#include <vector>

#include "swd/dwell.hpp"
#include "swd/lyapunov.hpp"
#include "swd/sim.hpp"

namespace swd {

using Json = nlohmann::ordered_json;

[[nodiscard]] Json to_json(const Vec& x);
[[nodiscard]] Json to_json(const CertificateReport& report);
[[nodiscard]] Json to_json(const DwellTable& table);
[[nodiscard]] Json to_json(const TriangleAnalysis& analysis);
[[nodiscard]] Json to_json(const TrappingReport& report);
[[nodiscard]] Json to_json(const IntervalVerdict& verdict);
[[nodiscard]] Json to_json(const ConvergenceReport& report);
[[nodiscard]] Json to_json(const DwellViolation& violation);
[[nodiscard]] Json to_json(std::span<const TubeSlice> tube);

}  // namespace swd
