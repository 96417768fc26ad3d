#pragma once

#include <iosfwd>

#include <json.hpp>

#include "flatlab/commutant.hpp"
#include "flatlab/compactcheck.hpp"
#include "flatlab/witness.hpp"

namespace flatlab {

using Json = nlohmann::ordered_json;

/// Top-level "schema" field carried by every report.
inline constexpr int kSchemaVersion = 1;

/// {"kind": "interval", "n": N} or {"kind": "grid", "nx": NX, "ny": NY}.
Json space_to_json(const MeasureSpace& space);
MeasureSpace space_from_json(const Json& j);

/// Sorted index array.
Json set_to_json(const MeasurableSet& e);
MeasurableSet set_from_json(const MeasureSpace& space, const Json& j);

Json to_json(const OperatorNormEstimate& est);
Json to_json(const FlatReport& report);
Json to_json(const LevelBand& band);
Json to_json(const WitnessTrace& trace, bool include_vectors = false);
Json to_json(const VerdictReport& report);
Json to_json(const DecayReport& report);

/// k, ||a_k||, ||b_k||, ||u_k||, ||v_k||, c_hat, margins of the bounds.
void write_trace_csv(std::ostream& out, const WitnessTrace& trace);
/// n, ||A e_n||, ||K|e_n|||
void write_decay_csv(std::ostream& out, const DecayReport& report);

}  // namespace flatlab
