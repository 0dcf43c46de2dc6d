#ifndef MAXVAR_IO_HPP
#define MAXVAR_IO_HPP

#include "maxvar/discrete.hpp"
#include "maxvar/envelope.hpp"
#include "maxvar/maxop.hpp"
#include "maxvar/proofpipe.hpp"
#include "maxvar/search.hpp"
#include "maxvar/stepfn.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace maxvar {

// All rationals cross the JSON boundary as exact "p/q" (or integer) strings.
using Json = nlohmann::ordered_json;

Json step_to_json(const StepFunction& f);
StepFunction step_from_json(const Json& j);

Json signal_to_json(const DiscreteSignal& s);
DiscreteSignal signal_from_json(const Json& j);

Json maxeval_to_json(const MaxEval& ev);
Json envelope_to_json(const Envelope& env);
Json report_to_json(const ChainReport& rep);
Json search_result_to_json(const SearchResult& res);

Json parse_json_text(const std::string& text);  // wraps parse failures in ParseError

}  // namespace maxvar

#endif
