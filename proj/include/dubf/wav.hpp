#pragma once

// RIFF/WAVE I/O. Reads 16-bit PCM (tag 1) and 32-bit IEEE float (tag 3, also
// inside WAVE_FORMAT_EXTENSIBLE); always writes 32-bit float, interleaved,
// little-endian. 16-bit samples scale by 1/32768, so 32767 reads as
// 32767/32768.

#include <filesystem>
#include <string>
#include <string_view>

#include "dubf/spectral.hpp"

namespace dubf {

std::string encode_wav(const MultichannelSignal& signal);

// Throws DataError carrying the byte offset of the first malformed field.
MultichannelSignal decode_wav(std::string_view bytes);

void write_wav(const std::filesystem::path& path, const MultichannelSignal& signal);
MultichannelSignal read_wav(const std::filesystem::path& path);

}  // namespace dubf
