#include "restrl/llm.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <regex>
#include <sstream>

#include <httplib.h>

#include "restrl/errors.hpp"

namespace restrl {

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

const std::vector<std::string> kFirstNames = {
    "john", "jane", "alice", "bob", "carol", "david", "emma", "frank",
    "grace", "henry"};
const std::vector<std::string> kLastNames = {
    "doe", "smith", "jones", "brown", "wilson", "moore", "taylor", "clark",
    "lewis", "walker"};
const std::vector<std::string> kDomains = {
    "example.com", "example.org", "mail.net", "test.io", "sample.dev"};
const std::vector<std::string> kHumanNames = {
    "John Doe",      "Mary Ann",     "Anne-Marie Clark", "Liam O'Brien",
    "Grace Hopper",  "Alan Turing",  "Ada Lovelace",     "Jean-Luc Picard",
    "Emma Stone",    "David Bowie"};
const std::vector<std::string> kWords = {
    "alpha", "bravo", "charlie", "delta", "echo",
    "foxtrot", "golf", "hotel", "india", "juliet"};
const std::vector<long long> kIntegers = {1001, 42, 7, 0, 12345,
                                          100,  3,  999, 256, 77};
const std::vector<double> kNumbers = {0.5, 1.0, 3.14, 9.99, 42.0,
                                      100.5, 7.25, 12.34, 0.01, 64.0};
const std::vector<std::string> kDates = {
    "2023-01-15", "2024-06-30", "2022-12-01", "2021-03-08", "2025-07-04",
    "2020-10-20", "2019-05-05", "2023-11-11", "2024-02-29", "2018-08-18"};
const std::vector<std::string> kUuids = {
    "7f6c3e9a-1b2d-4c5e-8f90-123456789abc",
    "0a1b2c3d-4e5f-6789-abcd-ef0123456789",
    "deadbeef-cafe-4bad-8bed-0123456789ab",
    "11111111-2222-4333-8444-555555555555",
    "9e107d9d-372b-4cde-9f83-418d9f2c1a2b",
    "aaaaaaaa-bbbb-4ccc-8ddd-eeeeeeeeeeee",
    "01234567-89ab-4cde-8f01-23456789abcd",
    "fedcba98-7654-4321-8fed-cba987654321",
    "5a5a5a5a-6b6b-4c7c-8d8d-9e9e9e9e9e9e",
    "c0ffee00-c0de-4bed-8bad-f00dfeed0123"};

enum class PatternShape { EmailLike, Alphanumeric, LettersSpaces, Unknown };

PatternShape classify_pattern(const std::string& p) {
  if (p.find('@') != std::string::npos) return PatternShape::EmailLike;
  if (p.find("a-zA-Z0-9") != std::string::npos ||
      p.find("A-Za-z0-9") != std::string::npos ||
      p.find("\\w") != std::string::npos)
    return PatternShape::Alphanumeric;
  if (p.find("\\pL") != std::string::npos ||
      p.find("\\p{L}") != std::string::npos ||
      (p.find("a-zA-Z") != std::string::npos && p.find(' ') != std::string::npos))
    return PatternShape::LettersSpaces;
  return PatternShape::Unknown;
}

constexpr char kAlphanum[] =
    "abcdefghijklmnopqrstuvwxyz0123456789";

std::string pad_to_length(std::string s, std::size_t min_len,
                          std::size_t max_len, std::uint64_t h) {
  while (s.size() < min_len) s += kAlphanum[h++ % 36];
  if (max_len > 0 && s.size() > max_len)
    s.resize(std::max<std::size_t>(1, max_len));
  return s;
}

}  // namespace

bool matches_pattern_or_unfilterable(const std::string& value,
                                     const std::string& pattern) {
  // \p{...} Unicode property classes are not expressible in std::regex
  // (libstdc++ silently mis-parses them rather than throwing)
  if (pattern.find("\\p") != std::string::npos) return true;
  try {
    std::regex re(pattern, std::regex::ECMAScript);
    return std::regex_search(value, re);
  } catch (const std::regex_error&) {
    return true;
  }
}

std::vector<Json> StubLlmClient::generate(const LlmRequest& request) {
  ++transport_calls_;
  const std::uint64_t base =
      fnv1a(request.operation_id + "\x1f" + request.parameter,
            1469598103934665603ull ^ seed_);
  const int count = std::max(1, request.count);
  std::vector<Json> out;

  const auto& cs = request.constraints;
  if (cs.enum_values && !cs.enum_values->empty()) {
    for (const auto& v : *cs.enum_values) {
      out.push_back(v);
      if (static_cast<int>(out.size()) >= count) break;
    }
    return out;
  }
  if (!request.spec_examples.empty()) {
    for (const auto& v : request.spec_examples) out.push_back(v);
    if (static_cast<int>(out.size()) >= count) {
      out.resize(count);
      return out;
    }
  }

  const std::size_t min_len = cs.min_length.value_or(1);
  const std::size_t max_len = cs.max_length.value_or(0);  // 0 = unbounded

  auto fill_strings = [&](auto produce) {
    for (int i = static_cast<int>(out.size()); i < count; ++i)
      out.push_back(produce(base + static_cast<std::uint64_t>(i), i));
  };

  switch (request.kind) {
    case ValueKind::String: {
      if (cs.pattern) {
        switch (classify_pattern(*cs.pattern)) {
          case PatternShape::EmailLike:
            fill_strings([&](std::uint64_t h, int) {
              std::string addr = kFirstNames[h % kFirstNames.size()] + "." +
                                 kLastNames[(h / 7) % kLastNames.size()] + "@" +
                                 kDomains[(h / 31) % kDomains.size()];
              return Json(addr);
            });
            break;
          case PatternShape::Alphanumeric:
            fill_strings([&](std::uint64_t h, int) {
              std::string s = kWords[h % kWords.size()] +
                              std::to_string(100 + (h / 11) % 900);
              return Json(pad_to_length(s, min_len, max_len, h));
            });
            break;
          case PatternShape::LettersSpaces:
            fill_strings([&](std::uint64_t h, int) {
              return Json(kHumanNames[h % kHumanNames.size()]);
            });
            break;
          case PatternShape::Unknown:
            fill_strings([&](std::uint64_t h, int) {
              std::string s = kWords[h % kWords.size()];
              return Json(pad_to_length(s, min_len, max_len, h));
            });
            break;
        }
      } else if (request.format == "date") {
        fill_strings([&](std::uint64_t h, int) {
          return Json(kDates[h % kDates.size()]);
        });
      } else if (request.format == "uuid") {
        fill_strings([&](std::uint64_t h, int) {
          return Json(kUuids[h % kUuids.size()]);
        });
      } else {
        fill_strings([&](std::uint64_t h, int) {
          std::string s = kWords[h % kWords.size()];
          return Json(pad_to_length(s, min_len, max_len, h));
        });
      }
      break;
    }
    case ValueKind::Integer: {
      const long long lo = cs.minimum ? static_cast<long long>(*cs.minimum)
                                      : std::numeric_limits<long long>::min();
      const long long hi = cs.maximum ? static_cast<long long>(*cs.maximum)
                                      : std::numeric_limits<long long>::max();
      for (long long v : kIntegers) {
        const long long clamped = std::clamp(v, lo, hi);
        if (std::find(out.begin(), out.end(), Json(clamped)) == out.end())
          out.push_back(clamped);
        if (static_cast<int>(out.size()) >= count) break;
      }
      break;
    }
    case ValueKind::Number: {
      for (double v : kNumbers) {
        double c = v;
        if (cs.minimum) c = std::max(c, *cs.minimum);
        if (cs.maximum) c = std::min(c, *cs.maximum);
        if (std::find(out.begin(), out.end(), Json(c)) == out.end())
          out.push_back(c);
        if (static_cast<int>(out.size()) >= count) break;
      }
      break;
    }
    case ValueKind::Boolean:
      out.push_back(true);
      out.push_back(false);
      break;
    case ValueKind::Array: {
      const SchemaNode* items =
          request.schema && request.schema->items ? request.schema->items.get()
                                                  : nullptr;
      LlmRequest item_req = request;
      item_req.parameter = request.parameter + "[]";
      item_req.kind = items ? items->kind : ValueKind::String;
      item_req.constraints = items ? items->constraints : ConstraintSet{};
      item_req.format = items ? items->format : std::nullopt;
      item_req.schema = items;
      item_req.count = 2;
      auto elems = generate(item_req);
      --transport_calls_;  // recursion is part of the same call
      Json arr = Json::array();
      for (const auto& e : elems) arr.push_back(e);
      out.push_back(arr);
      break;
    }
    case ValueKind::Object: {
      Json obj = Json::object();
      if (request.schema) {
        for (const auto& [name, child] : request.schema->properties) {
          LlmRequest prop_req = request;
          prop_req.parameter = request.parameter + "." + name;
          prop_req.kind = child.kind;
          prop_req.constraints = child.constraints;
          prop_req.format = child.format;
          prop_req.schema = &child;
          prop_req.count = 1;
          auto vals = generate(prop_req);
          --transport_calls_;
          if (!vals.empty()) obj[name] = vals[0];
        }
      }
      out.push_back(obj);
      break;
    }
  }
  if (out.empty()) out.push_back(nullptr);
  return out;
}

std::string HttpLlmClient::build_prompt(const LlmRequest& request) {
  // stable fixture: changing this invalidates recorded transcripts
  std::ostringstream p;
  p << "You generate test values for a REST API parameter.\n"
    << "Operation: " << request.operation_id << "\n"
    << "Parameter: " << request.parameter << "\n"
    << "Type: " << to_string(request.kind) << "\n";
  const auto& cs = request.constraints;
  if (cs.pattern) p << "Pattern: " << *cs.pattern << "\n";
  if (cs.min_length) p << "minLength: " << *cs.min_length << "\n";
  if (cs.max_length) p << "maxLength: " << *cs.max_length << "\n";
  if (cs.minimum) p << "minimum: " << *cs.minimum << "\n";
  if (cs.maximum) p << "maximum: " << *cs.maximum << "\n";
  if (cs.enum_values) {
    p << "Allowed values: " << Json(*cs.enum_values).dump() << "\n";
  }
  if (request.format) p << "Format: " << *request.format << "\n";
  if (!request.spec_examples.empty())
    p << "Examples from the specification: " << Json(request.spec_examples).dump()
      << "\n";
  p << "Reply with a JSON array of exactly " << request.count
    << " realistic candidate values and nothing else.";
  return p.str();
}

HttpLlmClient::HttpLlmClient(LlmClientConfig config)
    : config_(std::move(config)) {
  if (const char* key = std::getenv(config_.api_key_env.c_str()))
    api_key_ = key;
}

namespace {

std::vector<Json> parse_completion_content(const std::string& content) {
  std::string text = content;
  // models often wrap arrays in code fences
  auto start = text.find('[');
  auto end = text.rfind(']');
  if (start == std::string::npos || end == std::string::npos || end < start)
    throw MalformedCompletion("completion contains no JSON array");
  Json arr = Json::parse(text.substr(start, end - start + 1), nullptr, false);
  if (arr.is_discarded() || !arr.is_array())
    throw MalformedCompletion("completion is not a JSON array");
  return std::vector<Json>(arr.begin(), arr.end());
}

}  // namespace

std::vector<Json> HttpLlmClient::generate(const LlmRequest& request) {
  Json payload;
  payload["model"] = config_.model;
  payload["temperature"] = config_.temperature;
  payload["messages"] = Json::array(
      {Json{{"role", "system"},
            {"content", "You produce strictly valid JSON test data."}},
       Json{{"role", "user"}, {"content", build_prompt(request)}}});

  auto attempt = [&]() -> std::vector<Json> {
    ++transport_calls_;
    httplib::Client client(config_.endpoint);
    client.set_read_timeout(config_.timeout_s, 0);
    client.set_connection_timeout(config_.timeout_s, 0);
    httplib::Headers headers;
    if (!api_key_.empty())
      headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = client.Post("/v1/chat/completions", headers, payload.dump(),
                           "application/json");
    if (!res)
      throw TransportFailure("LLM endpoint unreachable: " + config_.endpoint);
    if (res->status < 200 || res->status >= 300)
      throw TransportFailure("LLM endpoint returned status " +
                             std::to_string(res->status));
    Json body = Json::parse(res->body, nullptr, false);
    if (body.is_discarded() || !body.contains("choices") ||
        body["choices"].empty())
      throw MalformedCompletion("response body lacks choices");
    return parse_completion_content(
        body["choices"][0]["message"]["content"].get<std::string>());
  };

  try {
    return attempt();
  } catch (const MalformedCompletion&) {
    return attempt();  // one retry, then the failure propagates
  }
}

const std::vector<Json>& LlmValueService::values(const LlmRequest& request) {
  const auto key = std::make_pair(request.operation_id, request.parameter);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  std::vector<Json> candidates;
  try {
    candidates = client_->generate(request);
  } catch (const TransportFailure&) {
    candidates.clear();
  } catch (const MalformedCompletion&) {
    candidates.clear();
  }

  if (request.constraints.pattern) {
    // a pattern implies a string parameter; non-strings cannot conform
    std::vector<Json> kept;
    for (auto& v : candidates) {
      if (v.is_string() &&
          matches_pattern_or_unfilterable(v.get<std::string>(),
                                          *request.constraints.pattern))
        kept.push_back(std::move(v));
    }
    candidates = std::move(kept);
  }
  return cache_.emplace(key, std::move(candidates)).first->second;
}

}  // namespace restrl
