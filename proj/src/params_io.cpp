#include "attn/params_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

#include "attn/error.hpp"

namespace attn {

std::string format_shortest(double value) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::string format_csv(double value) {
  if (std::isnan(value)) return "nan";
  std::array<char, 64> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), "%.17g", value);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

double parse_double(std::string_view token, std::size_t line) {
  while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
  while (!token.empty() && (token.back() == ' ' || token.back() == '\t' || token.back() == '\r')) token.remove_suffix(1);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw Error(ErrorCode::ParseError, "not a number: '" + std::string(token) + "'", line);
  }
  return value;
}

namespace {

using KeyValues = std::map<std::string, std::pair<std::string, std::size_t>, std::less<>>;

KeyValues split_key_values(std::string_view text) {
  KeyValues out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::ParseError, "expected name=value", line_no);
    std::string key(line.substr(0, eq));
    if (out.contains(key)) throw Error(ErrorCode::ParseError, "duplicate key " + key, line_no);
    out.emplace(std::move(key), std::make_pair(std::string(line.substr(eq + 1)), line_no));
  }
  return out;
}

double take_double(KeyValues& kv, const char* key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw Error(ErrorCode::ParseError, std::string("missing key ") + key);
  const double v = parse_double(it->second.first, it->second.second);
  kv.erase(it);
  return v;
}

void reject_leftovers(const KeyValues& kv) {
  if (!kv.empty()) {
    throw Error(ErrorCode::ParseError, "unknown key " + kv.begin()->first, kv.begin()->second.second);
  }
}

std::int64_t checked_population(double n) {
  if (!(n >= 1.0) || n != std::floor(n) || n > 9.0e18) {
    throw Error(ErrorCode::ParseError, "N must be a positive integer");
  }
  return static_cast<std::int64_t>(n);
}

}  // namespace

std::string to_key_value(const ModelParams& p) {
  std::string out;
  auto put = [&](const char* key, const std::string& value) { out += key; out += '='; out += value; out += '\n'; };
  put("alpha", format_shortest(p.alpha));
  put("beta", format_shortest(p.beta));
  put("theta", format_shortest(p.theta));
  put("w1", format_shortest(p.w1));
  put("w2", format_shortest(p.w2));
  put("w3", format_shortest(p.w3));
  put("C", format_shortest(p.C));
  put("N", std::to_string(p.N));
  put("quintile", std::string(to_string(p.quintile)));
  return out;
}

std::string to_key_value(const ProxyParams& p) {
  std::string out;
  auto put = [&](const char* key, double value) { out += key; out += '='; out += format_shortest(value); out += '\n'; };
  put("a", p.a);
  put("b", p.b);
  put("c", p.c);
  put("d", p.d);
  put("a_m", p.a_m);
  put("b_m", p.b_m);
  return out;
}

ModelParams model_params_from_key_value(std::string_view text) {
  auto kv = split_key_values(text);
  ModelParams p;
  p.alpha = take_double(kv, "alpha");
  p.beta = take_double(kv, "beta");
  p.theta = take_double(kv, "theta");
  p.w1 = take_double(kv, "w1");
  p.w2 = take_double(kv, "w2");
  p.w3 = take_double(kv, "w3");
  p.C = take_double(kv, "C");
  p.N = checked_population(take_double(kv, "N"));
  if (auto it = kv.find("quintile"); it != kv.end()) {
    auto q = parse_quintile(it->second.first);
    if (!q) throw Error(ErrorCode::ParseError, "bad quintile label", it->second.second);
    p.quintile = *q;
    kv.erase(it);
  }
  reject_leftovers(kv);
  return p;
}

ProxyParams proxy_params_from_key_value(std::string_view text) {
  auto kv = split_key_values(text);
  ProxyParams p;
  p.a = take_double(kv, "a");
  p.b = take_double(kv, "b");
  p.c = take_double(kv, "c");
  p.d = take_double(kv, "d");
  p.a_m = take_double(kv, "a_m");
  p.b_m = take_double(kv, "b_m");
  reject_leftovers(kv);
  return p;
}

void to_json(nlohmann::json& j, const ModelParams& p) {
  j = nlohmann::json{{"alpha", p.alpha}, {"beta", p.beta}, {"theta", p.theta},
                     {"w1", p.w1},       {"w2", p.w2},     {"w3", p.w3},
                     {"C", p.C},         {"N", p.N},       {"quintile", std::string(to_string(p.quintile))}};
}

void from_json(const nlohmann::json& j, ModelParams& p) {
  try {
    p.alpha = j.at("alpha").get<double>();
    p.beta = j.at("beta").get<double>();
    p.theta = j.at("theta").get<double>();
    p.w1 = j.at("w1").get<double>();
    p.w2 = j.at("w2").get<double>();
    p.w3 = j.at("w3").get<double>();
    p.C = j.at("C").get<double>();
    p.N = checked_population(j.at("N").get<double>());
    if (j.contains("quintile")) {
      auto q = parse_quintile(j.at("quintile").get<std::string>());
      if (!q) throw Error(ErrorCode::ParseError, "bad quintile label");
      p.quintile = *q;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

void to_json(nlohmann::json& j, const ProxyParams& p) {
  j = nlohmann::json{{"a", p.a}, {"b", p.b}, {"c", p.c}, {"d", p.d}, {"a_m", p.a_m}, {"b_m", p.b_m}};
}

void from_json(const nlohmann::json& j, ProxyParams& p) {
  try {
    p.a = j.at("a").get<double>();
    p.b = j.at("b").get<double>();
    p.c = j.at("c").get<double>();
    p.d = j.at("d").get<double>();
    p.a_m = j.at("a_m").get<double>();
    p.b_m = j.at("b_m").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

ModelParams load_model_params(std::string_view text) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, e.what());
    }
    if (j.contains("params")) return j.at("params").get<ModelParams>();
    return j.get<ModelParams>();
  }
  return model_params_from_key_value(text);
}

}  // namespace attn
