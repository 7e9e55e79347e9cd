#pragma once

// JSON encodings for the value types. Amounts are written as integers when
// whole and as decimals otherwise; decimals are read back exactly to six
// fractional digits.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pbpoll/battery.hpp"
#include "pbpoll/question.hpp"
#include "pbpoll/records.hpp"

namespace pbpoll {

using Json = nlohmann::json;

/// Parses text, mapping syntax errors to Error(ParseError).
Json parse_json(std::string_view text);

Json amount_to_json(const Amount& x);
Amount amount_from_json(const Json& j);

Json allocation_to_json(const BudgetAllocation& a);
/// Validates (without the grid constraint).
BudgetAllocation allocation_from_json(const Json& j);
Json deviation_to_json(const DeviationVector& d);
DeviationVector deviation_from_json(const Json& j);

Json option_to_json(const Option& o);
Option option_from_json(const Json& j);
Json provenance_to_json(const Provenance& p);
Provenance provenance_from_json(const Json& j);
Json answer_to_json(const Answer& a);
Answer answer_from_json(const Json& j);
Json question_to_json(const Question& q);
Question question_from_json(const Json& j);
Json battery_to_json(const QuestionBattery& b);
QuestionBattery battery_from_json(const Json& j);

Json model_to_json(const UtilityModel& m);
/// Accepts a bare kind name or an object with kind and parameters.
UtilityModel model_from_json(const Json& j);
Json config_to_json(const BatteryConfig& c);
/// Unknown keys are ignored; bad values raise Error(InvalidConfig).
BatteryConfig config_from_json(const Json& j);

Json record_to_json(const ResponseRecord& r);
ResponseRecord record_from_json(const Json& j);

/// One compact JSON document per line.
std::string records_to_ndjson(const std::vector<ResponseRecord>& records);
/// Blank lines are skipped. A line holding a non-record object (such as an
/// export header) is skipped when it has a "type" key other than "response".
std::vector<ResponseRecord> records_from_ndjson(std::string_view text);

}  // namespace pbpoll
