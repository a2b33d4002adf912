#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "vocalpersona/render_backend.hpp"

namespace vocalpersona::wav {

/// RIFF/WAVE, PCM format 1, mono, 16-bit little-endian. Samples are clamped
/// to [-1, 1] and scaled by 32767 with round-to-nearest.
std::vector<std::uint8_t> encode(const AudioBuffer& audio);

/// Reads 16-bit PCM; multi-channel input is averaged to mono. Unknown chunks
/// are skipped. Throws ParseError on malformed data.
AudioBuffer decode(std::span<const std::uint8_t> bytes);

/// Throws StorageError when the file cannot be written.
void write_file(const std::filesystem::path& path, const AudioBuffer& audio);

/// Throws StorageError / ParseError.
AudioBuffer read_file(const std::filesystem::path& path);

}  // namespace vocalpersona::wav
