#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tk {

// Shortest round-trip decimal form (std::to_chars). Used for every number
// written to CSV/JSON artifacts so that output bytes are reproducible.
std::string fmt_double(double v);

std::string fmt_u64_hex(std::uint64_t v);

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

bool parse_double(std::string_view s, double& out);
bool parse_i64(std::string_view s, std::int64_t& out);

// FNV-1a 64, streamed; fingerprints for model provenance.
struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void update(const void* data, std::size_t n);
  void update(std::string_view s) { update(s.data(), s.size()); }
  void update_double(double v) { update(&v, sizeof v); }
  void update_u64(std::uint64_t v) { update(&v, sizeof v); }
};

}  // namespace tk
