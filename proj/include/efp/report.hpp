// Serialization: certificates and membership reports as structured text
// (one timestamp comment line + canonical JSON), traces as CSV with a frozen
// column order. Identical inputs and seed give byte-identical bodies.
#pragma once

#include "efp/atlas.hpp"
#include "efp/solver.hpp"

namespace efp {

// Body only: deterministic, no timestamp.
std::string certificate_to_text(const Certificate& cert);
std::string membership_to_text(const MembershipReport& rep);
std::string solve_report_to_text(const SolveReport& rep);
std::string check_report_to_text(const CheckReport& rep, const std::string& kind);

// columns: n, coord_0..coord_{d-1}, residual, bound_apriori, bound_aposteriori
std::string trace_to_csv(const Trace& trace);

// Prepends "# generated: <iso8601>\n" and writes to path.
void write_report_file(const std::string& path, const std::string& body);

// File content with all "# generated" header lines removed (for diffing and
// for parsing the JSON body).
std::string strip_generated_header(const std::string& content);

// Round-trip used by the verify pass; throws std::runtime_error on malformed
// input.
Certificate certificate_from_text(const std::string& body);

// Re-checks a stored certificate pointwise at its recorded witness tuples
// (no re-sampling): margins must reproduce and the pass flag must be
// consistent with the stored tolerance.
CheckReport verify_certificate(const Certificate& cert, const MappingSpec& T,
                               const SpaceSpec& space);

}  // namespace efp
