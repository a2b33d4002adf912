#include "vocalpersona/wav.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string_view>

namespace vocalpersona::wav {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v)
{
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
    }
}

void put_tag(std::vector<std::uint8_t>& out, std::string_view tag)
{
    out.insert(out.end(), tag.begin(), tag.end());
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at)
{
    return std::uint32_t{b[at]} | std::uint32_t{b[at + 1]} << 8 | std::uint32_t{b[at + 2]} << 16
           | std::uint32_t{b[at + 3]} << 24;
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at)
{
    return static_cast<std::uint16_t>(b[at] | b[at + 1] << 8);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, std::string_view tag)
{
    return std::equal(tag.begin(), tag.end(), b.begin() + static_cast<std::ptrdiff_t>(at));
}

}  // namespace

std::vector<std::uint8_t> encode(const AudioBuffer& audio)
{
    const auto data_bytes = static_cast<std::uint32_t>(audio.pcm.size() * 2);
    const auto rate = static_cast<std::uint32_t>(audio.sample_rate);

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, 1);         // PCM
    put_u16(out, 1);         // mono
    put_u32(out, rate);
    put_u32(out, rate * 2);  // byte rate
    put_u16(out, 2);         // block align
    put_u16(out, 16);
    put_tag(out, "data");
    put_u32(out, data_bytes);
    for (float s : audio.pcm) {
        const double clamped = std::clamp(static_cast<double>(s), -1.0, 1.0);
        const auto v = static_cast<std::int16_t>(std::lround(clamped * 32767.0));
        put_u16(out, static_cast<std::uint16_t>(v));
    }
    return out;
}

AudioBuffer decode(std::span<const std::uint8_t> b)
{
    if (b.size() < 12 || !tag_is(b, 0, "RIFF") || !tag_is(b, 8, "WAVE")) {
        throw ParseError("not a RIFF/WAVE file", 1, 1);
    }
    std::size_t at = 12;
    std::uint16_t channels = 0;
    std::uint16_t bits = 0;
    std::uint32_t rate = 0;
    bool have_fmt = false;
    while (at + 8 <= b.size()) {
        const std::uint32_t size = get_u32(b, at + 4);
        const std::size_t body = at + 8;
        if (body + size > b.size()) {
            throw ParseError("chunk extends past end of file", 1, at + 1);
        }
        if (tag_is(b, at, "fmt ")) {
            if (size < 16 || get_u16(b, body) != 1) {
                throw ParseError("only PCM WAVE files are supported", 1, body + 1);
            }
            channels = get_u16(b, body + 2);
            rate = get_u32(b, body + 4);
            bits = get_u16(b, body + 14);
            have_fmt = true;
        }
        else if (tag_is(b, at, "data")) {
            if (!have_fmt || bits != 16 || channels == 0) {
                throw ParseError("data chunk before a 16-bit fmt chunk", 1, at + 1);
            }
            AudioBuffer out;
            out.sample_rate = static_cast<int>(rate);
            const std::size_t frames = size / (2u * channels);
            out.pcm.resize(frames);
            for (std::size_t i = 0; i < frames; ++i) {
                double acc = 0.0;
                for (std::size_t c = 0; c < channels; ++c) {
                    acc += static_cast<std::int16_t>(get_u16(b, body + 2 * (i * channels + c))) / 32767.0;
                }
                out.pcm[i] = static_cast<float>(acc / channels);
            }
            return out;
        }
        at = body + size + (size & 1);
    }
    throw ParseError("no data chunk", 1, at + 1);
}

void write_file(const std::filesystem::path& path, const AudioBuffer& audio)
{
    const auto bytes = encode(audio);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw StorageError("cannot open '" + path.string() + "' for writing");
    }
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) {
        throw StorageError("failed writing '" + path.string() + "'");
    }
}

AudioBuffer read_file(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw StorageError("cannot open '" + path.string() + "'");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return decode(bytes);
}

}  // namespace vocalpersona::wav
