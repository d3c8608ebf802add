#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "attn/model.hpp"

// Text serialization for model and proxy parameters. Both formats use the
// same field names; doubles are written in shortest round-trip form.
namespace attn {

/// Shortest decimal string that parses back to the same double.
std::string format_shortest(double value);
/// 17 significant digits, used for CSV output.
std::string format_csv(double value);
/// Strict decimal parse of the whole token; throws ParseError.
double parse_double(std::string_view token, std::size_t line = 0);

std::string to_key_value(const ModelParams& params);
std::string to_key_value(const ProxyParams& proxy);
ModelParams model_params_from_key_value(std::string_view text);
ProxyParams proxy_params_from_key_value(std::string_view text);

void to_json(nlohmann::json& j, const ModelParams& params);
void from_json(const nlohmann::json& j, ModelParams& params);
void to_json(nlohmann::json& j, const ProxyParams& proxy);
void from_json(const nlohmann::json& j, ProxyParams& proxy);

/// Accepts a key-value file, a flat JSON object, or a fit output whose
/// "params" member holds the model parameters.
ModelParams load_model_params(std::string_view text);

}  // namespace attn
