#pragma once

// Cache-first retrieval of raw drug structure / target sequence records.
// Only cache hits succeed when networking is disabled.

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>

#include "httplib.h"

#include "dtiboost/error.hpp"

namespace dtiboost {

enum class RecordKind { drug_structure, target_sequence };

inline const char* to_string(RecordKind kind) {
  return kind == RecordKind::drug_structure ? "drug_structure" : "target_sequence";
}

/// URL templates use `{id}` as the placeholder, e.g.
/// `http://rest.kegg.jp/get/{id}`. Plain http only.
struct FetchConfig {
  std::string drug_structure_url;
  std::string target_sequence_url;
  bool network_enabled = false;
  int timeout_seconds = 30;

  const std::string& url_template(RecordKind kind) const {
    return kind == RecordKind::drug_structure ? drug_structure_url : target_sequence_url;
  }
};

namespace detail {

inline std::string expand_url(std::string url, const std::string& id) {
  const std::string key = "{id}";
  for (auto pos = url.find(key); pos != std::string::npos; pos = url.find(key, pos + id.size()))
    url.replace(pos, key.size(), id);
  return url;
}

// Filesystem-safe file name for an identifier; other bytes become %XX.
inline std::string cache_file_name(const std::string& id) {
  std::string out;
  for (unsigned char c : id) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.') {
      out += static_cast<char>(c);
    } else {
      static constexpr char hex[] = "0123456789ABCDEF";
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out + ".txt";
}

inline std::mutex& cache_key_mutex(const std::string& key) {
  static std::mutex registry_mutex;
  static std::map<std::string, std::unique_ptr<std::mutex>> registry;
  std::lock_guard lock(registry_mutex);
  auto& m = registry[key];
  if (!m) m = std::make_unique<std::mutex>();
  return *m;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

inline std::filesystem::path cache_path(const std::filesystem::path& cache_dir, RecordKind kind,
                                        const std::string& id) {
  return cache_dir / to_string(kind) / detail::cache_file_name(id);
}

/// Returns the cached record for (kind, id), downloading and caching it first
/// when absent and networking is enabled. Response bodies are stored verbatim.
inline std::string fetch_record(const std::string& id, RecordKind kind,
                                const std::filesystem::path& cache_dir, const FetchConfig& config) {
  const auto path = cache_path(cache_dir, kind, id);
  std::lock_guard lock(detail::cache_key_mutex(path.string()));
  if (std::filesystem::exists(path)) return detail::read_file(path);

  if (!config.network_enabled)
    throw UnavailableError(std::string(to_string(kind)) + " record '" + id +
                           "' is not cached and networking is disabled");
  const auto& tmpl = config.url_template(kind);
  if (tmpl.empty()) throw InvalidArgument(std::string("no URL template for ") + to_string(kind));

  const auto url = detail::expand_url(tmpl, id);
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const auto origin = url.substr(0, path_start);
  const auto target = path_start == std::string::npos ? std::string("/") : url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(config.timeout_seconds);
  client.set_read_timeout(config.timeout_seconds);
  auto res = client.Get(target);
  if (!res)
    throw UnavailableError("request to " + url + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300)
    throw RemoteError("GET " + url + " returned HTTP " + std::to_string(res->status), res->status);

  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << res->body;
    if (!out) throw Error("cannot write cache file " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  return res->body;
}

}  // namespace dtiboost
