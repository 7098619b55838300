#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "formabench/errors.hpp"
#include "formabench/metrics.hpp"

namespace formabench {

struct ModelRequest {
  struct Part {
    enum class Kind { Text, Image };
    Kind kind = Kind::Text;
    std::string text;                // text content, or image file path
    std::vector<std::uint8_t> bytes; // pre-encoded image bytes, optional
    std::string mime = "image/png";
  };
  struct Message {
    std::string role = "user";
    std::vector<Part> parts;
  };
  // Routing key for scripted/oracle clients; ignored by the live client.
  struct Meta {
    std::string task_id;
    std::string pipeline;
    std::string step;
    std::string payload;  // step-specific data, e.g. candidate atoms
  };

  std::vector<Message> messages;
  double temperature = 0.7;
  int max_tokens = 1024;
  Meta meta;

  std::string prompt_text() const {
    std::string out;
    for (const auto& m : messages) {
      for (const auto& p : m.parts) {
        if (p.kind == Part::Kind::Text) out += p.text;
      }
    }
    return out;
  }
};

struct ModelResponse {
  std::string text;
  TokenUsage usage;
  std::string model_id;
};

class Client {
 public:
  virtual ~Client() = default;
  virtual ModelResponse complete(const ModelRequest& request) = 0;
};

namespace detail {

inline std::string base64_encode(const std::uint8_t* data, std::size_t len) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    std::uint32_t chunk = static_cast<std::uint32_t>(data[i]) << 16;
    if (i + 1 < len) chunk |= static_cast<std::uint32_t>(data[i + 1]) << 8;
    if (i + 2 < len) chunk |= static_cast<std::uint32_t>(data[i + 2]);
    out += alphabet[(chunk >> 18) & 63];
    out += alphabet[(chunk >> 12) & 63];
    out += i + 1 < len ? alphabet[(chunk >> 6) & 63] : '=';
    out += i + 2 < len ? alphabet[chunk & 63] : '=';
  }
  return out;
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file: " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

inline std::string mime_for_path(const std::string& path) {
  std::string ext = std::filesystem::path(path).extension().string();
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  return "image/png";
}

inline long estimate_tokens(const std::string& text) {
  return static_cast<long>(text.size() / 4);
}

inline std::string scripted_key(const ModelRequest::Meta& meta) {
  return meta.task_id + "__" + meta.pipeline + "__" + meta.step;
}

}  // namespace detail

// Deterministic test double keyed on (task_id, pipeline, step). Fixtures may
// live in memory or as "<task_id>__<pipeline>__<step>.txt" files.
class ScriptedClient : public Client {
 public:
  ScriptedClient() = default;
  explicit ScriptedClient(std::map<std::string, std::string> fixtures)
      : fixtures_(std::move(fixtures)) {}
  explicit ScriptedClient(const std::filesystem::path& dir) : dir_(dir) {}

  void add(const std::string& task_id, const std::string& pipeline,
           const std::string& step, const std::string& text) {
    fixtures_[task_id + "__" + pipeline + "__" + step] = text;
  }

  ModelResponse complete(const ModelRequest& request) override {
    std::string key = detail::scripted_key(request.meta);
    std::string text;
    auto it = fixtures_.find(key);
    if (it != fixtures_.end()) {
      text = it->second;
    } else if (!dir_.empty() &&
               std::filesystem::exists(dir_ / (key + ".txt"))) {
      std::ifstream in(dir_ / (key + ".txt"));
      std::stringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    } else {
      throw FixtureMissing("no scripted fixture for key '" + key + "'");
    }
    ModelResponse resp;
    resp.text = text;
    resp.model_id = "scripted";
    resp.usage.prompt_tokens = detail::estimate_tokens(request.prompt_text());
    resp.usage.response_tokens = detail::estimate_tokens(text);
    resp.usage.calls = 1;
    resp.usage.estimated = true;
    return resp;
  }

 private:
  std::map<std::string, std::string> fixtures_;
  std::filesystem::path dir_;
};

struct HttpClientConfig {
  std::string base_url;  // e.g. "https://api.openai.com/v1"
  std::string model;
  std::string api_key_env = "FORMABENCH_API_KEY";
  int max_attempts = 3;
  double read_timeout_seconds = 120.0;
};

// Live client speaking the OpenAI-compatible chat-completions wire format,
// with images as base64 data URLs. Request bodies for identical requests are
// byte-identical; only the auth header differs between deployments.
class HttpClient : public Client {
 public:
  explicit HttpClient(HttpClientConfig config) : config_(std::move(config)) {
    split_url();
  }

  // The exact JSON body sent over the wire, exposed for tests.
  static std::string request_body(const ModelRequest& request,
                                  const std::string& model) {
    nlohmann::json body;
    body["model"] = model;
    body["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages) {
      nlohmann::json msg;
      msg["role"] = m.role;
      msg["content"] = nlohmann::json::array();
      for (const auto& p : m.parts) {
        if (p.kind == ModelRequest::Part::Kind::Text) {
          msg["content"].push_back({{"type", "text"}, {"text", p.text}});
        } else {
          std::vector<std::uint8_t> bytes = p.bytes;
          std::string mime = p.mime;
          if (bytes.empty()) {
            bytes = detail::read_file_bytes(p.text);
            mime = detail::mime_for_path(p.text);
          }
          std::string url = "data:" + mime + ";base64," +
                            detail::base64_encode(bytes.data(), bytes.size());
          msg["content"].push_back(
              {{"type", "image_url"}, {"image_url", {{"url", url}}}});
        }
      }
      body["messages"].push_back(msg);
    }
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_tokens;
    return body.dump();
  }

  ModelResponse complete(const ModelRequest& request) override {
    std::string body = request_body(request, config_.model);
    httplib::Headers headers;
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key != nullptr && *key != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    double backoff = 0.5;
    for (int attempt = 1;; ++attempt) {
      httplib::Client http(host_);
      http.set_read_timeout(
          std::chrono::milliseconds(
              static_cast<long>(config_.read_timeout_seconds * 1000)));
      auto result = http.Post((path_prefix_ + "/chat/completions").c_str(),
                              headers, body, "application/json");
      if (!result) {
        if (result.error() == httplib::Error::Read ||
            result.error() == httplib::Error::ConnectionTimeout) {
          if (attempt >= config_.max_attempts) {
            throw TimeoutError("chat completion timed out");
          }
        } else if (attempt >= config_.max_attempts) {
          throw NetworkError("chat completion failed: " +
                             httplib::to_string(result.error()));
        }
        std::this_thread::sleep_for(
            std::chrono::milliseconds(static_cast<long>(backoff * 1000)));
        backoff *= 2.0;
        continue;
      }
      if (result->status < 200 || result->status >= 300) {
        throw ApiError(result->status, result->body.substr(0, 256));
      }
      return parse_response(result->body, request);
    }
  }

 private:
  static ModelResponse parse_response(const std::string& body,
                                      const ModelRequest& request) {
    nlohmann::json j = nlohmann::json::parse(body);
    ModelResponse resp;
    resp.text = j.at("choices").at(0).at("message").at("content")
                    .get<std::string>();
    resp.model_id = j.value("model", "");
    resp.usage.calls = 1;
    if (j.contains("usage")) {
      resp.usage.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
      resp.usage.response_tokens = j["usage"].value("completion_tokens", 0L);
    } else {
      resp.usage.prompt_tokens =
          detail::estimate_tokens(request.prompt_text());
      resp.usage.response_tokens = detail::estimate_tokens(resp.text);
      resp.usage.estimated = true;
    }
    return resp;
  }

  void split_url() {
    // host_ keeps scheme://authority; path_prefix_ keeps any trailing path.
    std::string url = config_.base_url;
    while (!url.empty() && url.back() == '/') url.pop_back();
    std::size_t scheme = url.find("://");
    std::size_t path = scheme == std::string::npos
                           ? url.find('/')
                           : url.find('/', scheme + 3);
    if (path == std::string::npos) {
      host_ = url;
      path_prefix_ = "";
    } else {
      host_ = url.substr(0, path);
      path_prefix_ = url.substr(path);
    }
  }

  HttpClientConfig config_;
  std::string host_;
  std::string path_prefix_;
};

}  // namespace formabench
