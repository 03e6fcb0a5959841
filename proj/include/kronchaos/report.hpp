#pragma once

// JSON and CSV views of bound and suite reports. Key order is fixed and
// doubles print in shortest round-trip form, so equal reports give equal
// bytes. Non-finite values serialize as null.

#include "kronchaos/bounds.hpp"
#include "kronchaos/suites.hpp"

#include "json.hpp"

#include <string>

namespace kronchaos {

using Json = nlohmann::ordered_json;

/// Bumped whenever a JSON key or CSV column changes.
inline constexpr int report_schema_version = 1;

Json to_json(const NormEstimate& e);
Json to_json(const NormTable& t);
Json to_json(const EmpiricalMoment& m);
Json to_json(const TailFrequency& f);
Json to_json(const BoundReport& r);
Json to_json(const DecouplingReport& r);
Json to_json(const MainUpperReport& r);
Json to_json(const MainLowerReport& r);
Json to_json(const AxTailReport& r);
Json to_json(const HansonWrightReport& r);
Json to_json(const GaussianDecouplingReport& r);
Json to_json(const IdentitiesReport& r);
Json to_json(const NormsReport& r);

/// Flat rows with a header line. Bound reports give one row per norm term
/// (I, partition, kappa, method, value); suites give one row per p or t.
std::string to_csv(const BoundReport& r);
std::string to_csv(const DecouplingReport& r);
std::string to_csv(const MainUpperReport& r);
std::string to_csv(const MainLowerReport& r);
std::string to_csv(const AxTailReport& r);
std::string to_csv(const HansonWrightReport& r);
std::string to_csv(const GaussianDecouplingReport& r);
std::string to_csv(const IdentitiesReport& r);
std::string to_csv(const NormsReport& r);

/// "{1,3}" style text for an axis set.
std::string axis_set_text(const AxisSet& s);

}  // namespace kronchaos
