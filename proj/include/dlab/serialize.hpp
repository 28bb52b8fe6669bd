#pragma once

#include <string>

#include "dlab/suites.hpp"

namespace dlab {

/// %.17g; "inf", "-inf" and "nan" for non-finite values.
std::string format_number(double v);

/// Name, scaling, measures, coordinates and the sorted edge list.
Json space_to_json(const GraphSpace& space);

/// "index,eigenvalue" rows for the first k eigenvalues (all when k == 0).
std::string eigenvalues_csv(const GeneratorSpectrum& spec, std::size_t k = 0);
/// One row per domain vertex: "vertex,phi_0,...,phi_{k-1}".
std::string modes_csv(const GeneratorSpectrum& spec, std::size_t k = 0);
Json spectrum_to_json(const GeneratorSpectrum& spec, std::size_t k = 0);

/// "whole", "ball:<center>:<r>" (open), "cball:<center>:<r>" (closed),
/// "range:<a>:<b>" (inclusive) or "vertices:<a>,<b>,...".
DomainMask parse_domain(const GraphSpace& space, const std::string& text);

/// "zero", "const:<c>", "well:<center>:<radius>:<depth>" (V = -depth on the
/// closed ball) or "values:<v0>,<v1>,..." (one per vertex).
PotentialField parse_potential(const GraphSpace& space, const std::string& text);

/// Per-instance report document.
Json instance_to_json(const std::string& suite, const InstanceRecord& rec);

/// "record,suite,id,tag,verdict,lhs,rhs,note": instances sorted by digest,
/// then suite-level checks in their fixed order.
std::string summary_csv(const SuiteResult& result);

}  // namespace dlab
