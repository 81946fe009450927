#include "cefr/zip.hpp"

#include <cstdint>
#include <limits>
#include <set>

#include <zlib.h>

#include "cefr/error.hpp"

namespace cefr::zip {
namespace {

constexpr std::uint32_t kLocalHeader = 0x04034b50;
constexpr std::uint32_t kCentralHeader = 0x02014b50;
constexpr std::uint32_t kEndOfCentral = 0x06054b50;
constexpr std::uint16_t kStored = 0;
constexpr std::uint16_t kDeflate = 8;
constexpr std::uint16_t kUtf8Flag = 1u << 11;
// 1980-01-01 00:00, the DOS epoch; entries carry no meaningful mtime.
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;

[[noreturn]] void corrupt(const std::string& why)
{
    throw Error(ErrorCode::CorruptArchive, "corrupt archive: " + why);
}

void put16(std::string& out, std::uint16_t v)
{
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& out, std::uint32_t v)
{
    put16(out, static_cast<std::uint16_t>(v & 0xffff));
    put16(out, static_cast<std::uint16_t>(v >> 16));
}

class Cursor {
public:
    Cursor(std::string_view bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

    std::uint16_t u16()
    {
        need(2);
        const auto v = static_cast<std::uint16_t>(byte(0) | (byte(1) << 8));
        pos_ += 2;
        return v;
    }

    std::uint32_t u32()
    {
        need(4);
        const auto v = static_cast<std::uint32_t>(byte(0)) | (static_cast<std::uint32_t>(byte(1)) << 8)
                     | (static_cast<std::uint32_t>(byte(2)) << 16)
                     | (static_cast<std::uint32_t>(byte(3)) << 24);
        pos_ += 4;
        return v;
    }

    std::string_view take(std::size_t n)
    {
        need(n);
        const auto out = bytes_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    void skip(std::size_t n) { take(n); }

private:
    void need(std::size_t n) const
    {
        if (pos_ > bytes_.size() || bytes_.size() - pos_ < n) {
            corrupt("unexpected end of data");
        }
    }
    unsigned byte(std::size_t i) const { return static_cast<unsigned char>(bytes_[pos_ + i]); }

    std::string_view bytes_;
    std::size_t pos_;
};

std::uint32_t crc_of(std::string_view data)
{
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
}

std::string deflate_raw(std::string_view data)
{
    z_stream zs{};
    if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY)
        != Z_OK) {
        throw Error(ErrorCode::IoError, "deflateInit2 failed");
    }
    std::string out(deflateBound(&zs, static_cast<uLong>(data.size())), '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) {
        throw Error(ErrorCode::IoError, "deflate failed");
    }
    out.resize(zs.total_out);
    return out;
}

std::string inflate_raw(std::string_view data, std::size_t expected_size)
{
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
        corrupt("inflateInit2 failed");
    }
    std::string out(expected_size, '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    const auto produced = zs.total_out;
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || produced != expected_size) {
        corrupt("deflate stream is damaged");
    }
    return out;
}

} // namespace

std::string write(const std::vector<Entry>& entries)
{
    struct Written {
        std::uint32_t crc;
        std::uint32_t compressed;
        std::uint32_t size;
        std::uint32_t offset;
        std::uint16_t method;
    };
    constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();

    std::string out;
    std::vector<Written> written;
    std::set<std::string> names;
    for (const auto& entry : entries) {
        if (!names.insert(entry.name).second) {
            throw Error(ErrorCode::InvalidArgument, "duplicate zip entry " + entry.name);
        }
        if (entry.data.size() >= kMax || out.size() >= kMax) {
            throw Error(ErrorCode::InvalidArgument, "zip64 archives are not supported");
        }
        auto payload = deflate_raw(entry.data);
        std::uint16_t method = kDeflate;
        if (payload.size() >= entry.data.size()) {
            payload = entry.data;
            method = kStored;
        }
        const Written w{crc_of(entry.data), static_cast<std::uint32_t>(payload.size()),
                        static_cast<std::uint32_t>(entry.data.size()),
                        static_cast<std::uint32_t>(out.size()), method};
        put32(out, kLocalHeader);
        put16(out, 20);
        put16(out, kUtf8Flag);
        put16(out, w.method);
        put16(out, 0);
        put16(out, kDosDate);
        put32(out, w.crc);
        put32(out, w.compressed);
        put32(out, w.size);
        put16(out, static_cast<std::uint16_t>(entry.name.size()));
        put16(out, 0);
        out += entry.name;
        out += payload;
        written.push_back(w);
    }

    const auto central_offset = static_cast<std::uint32_t>(out.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& w = written[i];
        put32(out, kCentralHeader);
        put16(out, 20);
        put16(out, 20);
        put16(out, kUtf8Flag);
        put16(out, w.method);
        put16(out, 0);
        put16(out, kDosDate);
        put32(out, w.crc);
        put32(out, w.compressed);
        put32(out, w.size);
        put16(out, static_cast<std::uint16_t>(entries[i].name.size()));
        put16(out, 0);
        put16(out, 0);
        put16(out, 0);
        put16(out, 0);
        put32(out, 0);
        put32(out, w.offset);
        out += entries[i].name;
    }
    const auto central_size = static_cast<std::uint32_t>(out.size()) - central_offset;

    put32(out, kEndOfCentral);
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<std::uint16_t>(entries.size()));
    put16(out, static_cast<std::uint16_t>(entries.size()));
    put32(out, central_size);
    put32(out, central_offset);
    put16(out, 0);
    return out;
}

std::vector<Entry> read(std::string_view bytes)
{
    constexpr std::size_t kEocdSize = 22;
    if (bytes.size() < kEocdSize) {
        corrupt("too short");
    }
    // The end record sits at the tail, possibly followed by a comment.
    std::size_t eocd = std::string_view::npos;
    const std::size_t lowest = bytes.size() > kEocdSize + 0xffff ? bytes.size() - kEocdSize - 0xffff : 0;
    for (std::size_t pos = bytes.size() - kEocdSize + 1; pos-- > lowest;) {
        if (Cursor(bytes, pos).u32() == kEndOfCentral) {
            eocd = pos;
            break;
        }
    }
    if (eocd == std::string_view::npos) {
        corrupt("end of central directory not found");
    }

    Cursor end(bytes, eocd + 4);
    const auto disk = end.u16();
    const auto cd_disk = end.u16();
    const auto disk_entries = end.u16();
    const auto total_entries = end.u16();
    const auto cd_size = end.u32();
    const auto cd_offset = end.u32();
    if (disk != 0 || cd_disk != 0 || disk_entries != total_entries) {
        corrupt("multi-disk archives are not supported");
    }
    if (static_cast<std::size_t>(cd_offset) + cd_size > eocd) {
        corrupt("central directory out of bounds");
    }

    std::vector<Entry> entries;
    std::set<std::string> names;
    Cursor central(bytes, cd_offset);
    for (unsigned i = 0; i < total_entries; ++i) {
        if (central.u32() != kCentralHeader) {
            corrupt("bad central directory signature");
        }
        central.skip(4); // versions
        const auto flags = central.u16();
        const auto method = central.u16();
        central.skip(4); // time, date
        const auto crc = central.u32();
        const auto compressed = central.u32();
        const auto size = central.u32();
        const auto name_len = central.u16();
        const auto extra_len = central.u16();
        const auto comment_len = central.u16();
        central.skip(8); // disk, internal attrs, external attrs
        const auto local_offset = central.u32();
        std::string name(central.take(name_len));
        central.skip(extra_len + comment_len);

        if (flags & 0x1) {
            corrupt("encrypted entries are not supported");
        }
        if (!names.insert(name).second) {
            corrupt("duplicate entry " + name);
        }

        Cursor local(bytes, local_offset);
        if (local.u32() != kLocalHeader) {
            corrupt("bad local header for " + name);
        }
        local.skip(22);
        const auto local_name_len = local.u16();
        const auto local_extra_len = local.u16();
        if (local.take(local_name_len) != name) {
            corrupt("local header name mismatch for " + name);
        }
        local.skip(local_extra_len);
        const auto payload = local.take(compressed);

        std::string data;
        if (method == kStored) {
            if (compressed != size) {
                corrupt("stored entry size mismatch for " + name);
            }
            data.assign(payload);
        } else if (method == kDeflate) {
            data = inflate_raw(payload, size);
        } else {
            corrupt("unsupported compression method for " + name);
        }
        if (crc_of(data) != crc) {
            corrupt("CRC mismatch for " + name);
        }
        entries.push_back({std::move(name), std::move(data)});
    }
    return entries;
}

} // namespace cefr::zip
