#pragma once

#include <string>

#include "json.hpp"
#include "pspec/bounds.hpp"
#include "pspec/capacity.hpp"
#include "pspec/cheeger.hpp"
#include "pspec/eigensolver.hpp"
#include "pspec/nodal.hpp"
#include "pspec/shapes.hpp"

namespace pspec {

using Json = nlohmann::ordered_json;

// Finite values rounded to 12 significant digits; non-finite values as "inf", "-inf", "nan".
Json number(double v);
double number_from(const Json& j);

Json to_json(const ShapeSpec& s);
// Accepts a catalog name or an object {"variant": ..., parameters..., "label": ...}.
// Throws ConfigParse.
ShapeSpec shape_from_json(const Json& j);

// Field values are omitted; they go to separate files when needed.
Json to_json(const EigenResult& r);
Json to_json(const CheegerEstimate& c);
Json to_json(const CapacityResult& c);
Json to_json(const RadiusSearchResult& r);
Json to_json(const BoundReport& r);
Json to_json(const NodalMeasurement& m);
Json to_json(const NodalScalingResult& s);
Json to_json(const GeometrySummary& g);

// Columns: id, domain, p, lhs, rhs, satisfied, slack, skipped, skip_reason.
std::string csv_header();
std::string to_csv_row(const BoundReport& r);

std::string format_number(double v);

}  // namespace pspec
