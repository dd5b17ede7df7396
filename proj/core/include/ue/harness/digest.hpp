#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

namespace ue::harness {

// Lowercase hex SHA-1 of "blob <size>\0" followed by the bytes, the id git
// assigns to a file with this content.
std::string git_blob_sha1(std::string_view bytes);
std::string git_blob_sha1_file(const std::filesystem::path& path);

// Hashes whatever `writer` emits without buffering it: one pass counts the
// bytes, a second pass feeds the hash. `writer` must be deterministic.
std::string git_blob_sha1_stream(const std::function<void(std::ostream&)>& writer);

}  // namespace ue::harness
