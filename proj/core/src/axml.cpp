#include <cstdint>
#include <string>
#include <vector>

#include "adlens/errors.hpp"
#include "adlens/frontend.hpp"

namespace adlens {
namespace {

constexpr std::uint16_t kChunkXml = 0x0003;
constexpr std::uint16_t kChunkStringPool = 0x0001;
constexpr std::uint16_t kChunkStartElement = 0x0102;
constexpr char kAndroidNs[] = "http://schemas.android.com/apk/res/android";

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> b) : b_(b) {}
  std::uint8_t u8(size_t off) const {
    check(off, 1);
    return b_[off];
  }
  std::uint16_t u16(size_t off) const {
    check(off, 2);
    return static_cast<std::uint16_t>(b_[off] | (b_[off + 1] << 8));
  }
  std::uint32_t u32(size_t off) const {
    check(off, 4);
    return b_[off] | (b_[off + 1] << 8) | (b_[off + 2] << 16) |
           (static_cast<std::uint32_t>(b_[off + 3]) << 24);
  }
  void check(size_t off, size_t len) const {
    if (off > b_.size() || b_.size() - off < len)
      throw BadChunk("axml read beyond end of file");
  }
  size_t size() const { return b_.size(); }

 private:
  std::span<const std::uint8_t> b_;
};

struct StringPool {
  std::vector<std::string> strings;

  std::string at(std::uint32_t idx) const {
    if (idx == 0xffffffffu) return {};
    if (idx >= strings.size()) throw BadChunk("string pool index out of range");
    return strings[idx];
  }
};

StringPool parse_string_pool(const Cursor& c, size_t chunk, size_t chunk_size) {
  StringPool pool;
  std::uint32_t count = c.u32(chunk + 8);
  std::uint32_t flags = c.u32(chunk + 16);
  std::uint32_t strings_start = c.u32(chunk + 20);
  bool utf8 = (flags & (1u << 8)) != 0;
  if (count > chunk_size) throw BadChunk("string pool count exceeds chunk");
  pool.strings.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t rel = c.u32(chunk + 28 + 4u * i);
    size_t off = chunk + strings_start + rel;
    std::string s;
    if (utf8) {
      // u8 char-count then u8 byte-count, both with high-bit extension
      size_t p = off;
      std::uint32_t n = c.u8(p++);
      if (n & 0x80) n = ((n & 0x7f) << 8) | c.u8(p++);
      std::uint32_t bytes = c.u8(p++);
      if (bytes & 0x80) bytes = ((bytes & 0x7f) << 8) | c.u8(p++);
      c.check(p, bytes);
      for (std::uint32_t k = 0; k < bytes; ++k)
        s.push_back(static_cast<char>(c.u8(p + k)));
    } else {
      size_t p = off;
      std::uint32_t n = c.u16(p);
      p += 2;
      if (n & 0x8000) {
        n = ((n & 0x7fff) << 16) | c.u16(p);
        p += 2;
      }
      c.check(p, static_cast<size_t>(n) * 2);
      for (std::uint32_t k = 0; k < n; ++k) {
        std::uint16_t ch = c.u16(p + 2u * k);
        // non-BMP and non-ASCII folded bytewise; names are ASCII in practice
        if (ch < 0x80) {
          s.push_back(static_cast<char>(ch));
        } else {
          s.push_back(static_cast<char>(0xc0 | (ch >> 6)));
          s.push_back(static_cast<char>(0x80 | (ch & 0x3f)));
        }
      }
    }
    pool.strings.push_back(std::move(s));
  }
  return pool;
}

std::string resolve_activity_name(const std::string& name,
                                  const std::string& package) {
  if (name.empty()) return name;
  if (name.front() == '.') return package + name;
  if (name.find('.') == std::string::npos) return package + "." + name;
  return name;
}

ManifestInfo parse_axml(const Cursor& c) {
  if (c.u16(2) < 8) throw BadChunk("bad axml header size");
  std::uint32_t doc_size = c.u32(4);
  if (doc_size > c.size()) throw BadChunk("axml document size beyond file");

  StringPool pool;
  bool have_pool = false;
  ManifestInfo info;
  bool have_package = false;
  std::vector<std::string> pending_activities;

  size_t off = c.u16(2);
  while (off + 8 <= doc_size) {
    std::uint16_t type = c.u16(off);
    std::uint16_t header_size = c.u16(off + 2);
    std::uint32_t size = c.u32(off + 4);
    if (size < 8 || header_size < 8 || size < header_size ||
        off + size > doc_size)
      throw BadChunk("malformed axml chunk at offset " + std::to_string(off));
    if (type == kChunkStringPool) {
      pool = parse_string_pool(c, off, size);
      have_pool = true;
    } else if (type == kChunkStartElement) {
      if (!have_pool) throw BadChunk("element before string pool");
      std::string element = pool.at(c.u32(off + 20));
      std::uint16_t attr_start = c.u16(off + 24);
      std::uint16_t attr_size = c.u16(off + 26);
      std::uint16_t attr_count = c.u16(off + 28);
      if (attr_size < 20) throw BadChunk("attribute size too small");
      for (std::uint16_t i = 0; i < attr_count; ++i) {
        size_t a = off + 16 + attr_start + static_cast<size_t>(attr_size) * i;
        c.check(a, attr_size);
        std::string ns = pool.at(c.u32(a));
        std::string name = pool.at(c.u32(a + 4));
        std::uint32_t raw = c.u32(a + 8);
        std::uint8_t data_type = c.u8(a + 15);
        std::uint32_t data = c.u32(a + 16);
        std::string value;
        if (raw != 0xffffffffu)
          value = pool.at(raw);
        else if (data_type == 0x03)  // TYPE_STRING
          value = pool.at(data);
        if (element == "manifest" && ns.empty() && name == "package") {
          info.package_name = value;
          have_package = true;
        } else if (element == "activity" && ns == kAndroidNs &&
                   name == "name") {
          pending_activities.push_back(value);
        }
      }
    }
    off += size;
  }
  if (!have_package)
    throw MissingPackageAttr("manifest has no package attribute");
  for (const auto& a : pending_activities)
    info.activities.push_back(resolve_activity_name(a, info.package_name));
  return info;
}

// Minimal plaintext scan for research fixtures: walks <...> tags and pulls
// key="value" attributes. Not a general XML parser.
ManifestInfo parse_text_xml(std::span<const std::uint8_t> bytes) {
  std::string text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  ManifestInfo info;
  bool have_package = false;
  std::vector<std::string> pending;

  size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    size_t end = text.find('>', pos);
    if (end == std::string::npos) break;
    std::string tag = text.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty() || tag[0] == '?' || tag[0] == '!' || tag[0] == '/')
      continue;
    size_t name_end = tag.find_first_of(" \t\r\n/");
    std::string element = tag.substr(0, name_end);
    auto attr = [&tag](const std::string& key) -> std::string {
      size_t p = 0;
      while ((p = tag.find(key, p)) != std::string::npos) {
        size_t after = p + key.size();
        // require attribute boundary on the left and '=' next
        if (p > 0 && !isspace(static_cast<unsigned char>(tag[p - 1]))) {
          p = after;
          continue;
        }
        size_t eq = tag.find_first_not_of(" \t\r\n", after);
        if (eq == std::string::npos || tag[eq] != '=') {
          p = after;
          continue;
        }
        size_t q1 = tag.find_first_of("\"'", eq + 1);
        if (q1 == std::string::npos) return {};
        size_t q2 = tag.find(tag[q1], q1 + 1);
        if (q2 == std::string::npos) return {};
        return tag.substr(q1 + 1, q2 - q1 - 1);
      }
      return {};
    };
    if (element == "manifest") {
      std::string pkg = attr("package");
      if (!pkg.empty()) {
        info.package_name = pkg;
        have_package = true;
      }
    } else if (element == "activity") {
      std::string name = attr("android:name");
      if (!name.empty()) pending.push_back(name);
    }
  }
  if (!have_package)
    throw MissingPackageAttr("manifest has no package attribute");
  for (const auto& a : pending)
    info.activities.push_back(resolve_activity_name(a, info.package_name));
  return info;
}

}  // namespace

ManifestInfo parse_manifest(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 4) {
    Cursor c(bytes);
    if (c.u16(0) == kChunkXml) return parse_axml(c);
  }
  // plaintext fallback; require something tag-like
  for (std::uint8_t b : bytes)
    if (b == '<') return parse_text_xml(bytes);
  throw BadChunk("input is neither binary axml nor xml text");
}

}  // namespace adlens
