#pragma once

#include <cstdint>
#include <string>

namespace bvae {

// Hex digest of a byte buffer / file.
std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_file(const std::string& path);

// "<digest>  <basename>\n" sidecar, matching sha256sum's format.
void write_checksum_sidecar(const std::string& file_path);
bool verify_checksum_sidecar(const std::string& file_path);

}  // namespace bvae
