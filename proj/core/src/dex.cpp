#include <array>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include "adlens/errors.hpp"
#include "adlens/frontend.hpp"
#include "adlens/model.hpp"

namespace adlens {
namespace {

// Code-unit length per opcode. Formats 10x/12x/11n/11x/10t -> 1,
// 20t/22x/21t/21s/21h/21c/23x/22b/22t/22s/22c -> 2,
// 32x/30t/31t/31i/31c/35c/3rc -> 3, 45cc/4rcc -> 4, 51l -> 5.
constexpr std::array<std::uint8_t, 256> kUnitLen = [] {
  std::array<std::uint8_t, 256> t{};
  auto fill = [&t](int lo, int hi, std::uint8_t n) {
    for (int i = lo; i <= hi; ++i) t[static_cast<size_t>(i)] = n;
  };
  fill(0x00, 0xff, 1);  // default; unused opcodes treated as one unit
  fill(0x02, 0x03, 2);
  t[0x03] = 3;
  t[0x05] = 2;
  t[0x06] = 3;
  t[0x08] = 2;
  t[0x09] = 3;
  t[0x13] = 2;
  t[0x14] = 3;
  t[0x15] = 2;
  t[0x16] = 2;
  t[0x17] = 3;
  t[0x18] = 5;
  t[0x19] = 2;
  t[0x1a] = 2;
  t[0x1b] = 3;
  t[0x1c] = 2;
  t[0x1f] = 2;
  t[0x20] = 2;
  t[0x22] = 2;
  t[0x23] = 2;
  t[0x24] = 3;
  t[0x25] = 3;
  t[0x26] = 3;
  t[0x29] = 2;
  t[0x2a] = 3;
  t[0x2b] = 3;
  t[0x2c] = 3;
  fill(0x2d, 0x31, 2);
  fill(0x32, 0x37, 2);
  fill(0x38, 0x3d, 2);
  fill(0x44, 0x51, 2);
  fill(0x52, 0x5f, 2);
  fill(0x60, 0x6d, 2);
  fill(0x6e, 0x72, 3);  // invoke-kind
  fill(0x74, 0x78, 3);  // invoke-kind/range
  fill(0x90, 0xaf, 2);
  fill(0xd0, 0xd7, 2);
  fill(0xd8, 0xe2, 2);
  t[0xfa] = 4;  // invoke-polymorphic
  t[0xfb] = 4;  // invoke-polymorphic/range
  t[0xfc] = 3;  // invoke-custom
  t[0xfd] = 3;  // invoke-custom/range
  t[0xfe] = 2;  // const-method-handle
  t[0xff] = 2;  // const-method-type
  return t;
}();

bool is_method_invoke(std::uint8_t op) {
  return (op >= 0x6e && op <= 0x72) || (op >= 0x74 && op <= 0x78) ||
         op == 0xfa || op == 0xfb;
}

std::uint32_t adler32(std::span<const std::uint8_t> data) {
  std::uint32_t a = 1, b = 0;
  for (std::uint8_t byte : data) {
    a = (a + byte) % 65521u;
    b = (b + a) % 65521u;
  }
  return (b << 16) | a;
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  size_t size() const { return bytes_.size(); }

  std::uint8_t u8(size_t off) const {
    check(off, 1);
    return bytes_[off];
  }
  std::uint16_t u16(size_t off) const {
    check(off, 2);
    return static_cast<std::uint16_t>(bytes_[off] | (bytes_[off + 1] << 8));
  }
  std::uint32_t u32(size_t off) const {
    check(off, 4);
    return bytes_[off] | (bytes_[off + 1] << 8) | (bytes_[off + 2] << 16) |
           (static_cast<std::uint32_t>(bytes_[off + 3]) << 24);
  }
  std::uint32_t uleb128(size_t& off) const {
    std::uint32_t result = 0;
    for (int shift = 0; shift < 35; shift += 7) {
      std::uint8_t b = u8(off++);
      result |= static_cast<std::uint32_t>(b & 0x7f) << shift;
      if ((b & 0x80) == 0) return result;
    }
    throw TruncatedFile("uleb128 longer than 5 bytes");
  }
  void check(size_t off, size_t len) const {
    if (off > bytes_.size() || bytes_.size() - off < len)
      throw TruncatedFile("offset " + std::to_string(off) + "+" +
                          std::to_string(len) + " beyond file size " +
                          std::to_string(bytes_.size()));
  }
  std::span<const std::uint8_t> raw() const { return bytes_; }

 private:
  std::span<const std::uint8_t> bytes_;
};

// "Lcom/foo/Bar;" -> "com.foo.Bar"; primitive and array descriptors kept.
std::string descriptor_to_dotted(const std::string& desc) {
  if (desc.size() >= 3 && desc.front() == 'L' && desc.back() == ';') {
    std::string out = desc.substr(1, desc.size() - 2);
    for (char& c : out)
      if (c == '/') c = '.';
    return out;
  }
  return desc;
}

class DexParser {
 public:
  DexParser(Reader reader, const DexOptions& options)
      : r_(reader), options_(options) {}

  std::vector<ClassRecord> parse() {
    parse_header();
    std::vector<ClassRecord> out;
    out.reserve(class_defs_size_);
    for (std::uint32_t i = 0; i < class_defs_size_; ++i)
      out.push_back(parse_class_def(class_defs_off_ + 32u * i));
    return out;
  }

 private:
  void parse_header() {
    // Magic and version are validated before the full-header bounds check so
    // non-dex input reports BadMagic rather than TruncatedFile.
    static const std::uint8_t kMagic[4] = {'d', 'e', 'x', '\n'};
    if (std::memcmp(r_.raw().data(), kMagic, 4) != 0)
      throw BadMagic("not a dex file");
    if (r_.u8(7) != 0 || r_.u8(4) != '0')
      throw BadMagic("malformed dex version tag");
    int version = (r_.u8(5) - '0') * 10 + (r_.u8(6) - '0');
    if (version < 35 || version > 39)
      throw UnsupportedVersion("dex version 0" + std::to_string(version));
    r_.check(0, 0x70);
    if (options_.verify_checksum) {
      std::uint32_t stored = r_.u32(8);
      std::uint32_t actual = adler32(r_.raw().subspan(12));
      if (stored != actual)
        throw TruncatedFile("adler32 mismatch: header says " +
                            std::to_string(stored) + ", computed " +
                            std::to_string(actual));
    }
    string_ids_size_ = r_.u32(56);
    string_ids_off_ = r_.u32(60);
    type_ids_size_ = r_.u32(64);
    type_ids_off_ = r_.u32(68);
    proto_ids_size_ = r_.u32(72);
    proto_ids_off_ = r_.u32(76);
    method_ids_size_ = r_.u32(88);
    method_ids_off_ = r_.u32(92);
    class_defs_size_ = r_.u32(96);
    class_defs_off_ = r_.u32(100);
    check_table(string_ids_off_, string_ids_size_, 4, "string_ids");
    check_table(type_ids_off_, type_ids_size_, 4, "type_ids");
    check_table(proto_ids_off_, proto_ids_size_, 12, "proto_ids");
    check_table(method_ids_off_, method_ids_size_, 8, "method_ids");
    check_table(class_defs_off_, class_defs_size_, 32, "class_defs");
  }

  void check_table(std::uint32_t off, std::uint32_t count, std::uint32_t entry,
                   const char* name) const {
    if (count == 0) return;
    if (off > r_.size() ||
        static_cast<std::uint64_t>(count) * entry > r_.size() - off)
      throw TruncatedFile(std::string(name) + " table out of bounds");
  }

  std::string string_at(std::uint32_t idx) const {
    if (idx >= string_ids_size_)
      throw TruncatedFile("string index " + std::to_string(idx) +
                          " out of range");
    size_t off = r_.u32(string_ids_off_ + 4u * idx);
    std::uint32_t utf16_len = r_.uleb128(off);
    (void)utf16_len;
    std::string s;
    for (;;) {
      std::uint8_t b = r_.u8(off++);
      if (b == 0) break;
      s.push_back(static_cast<char>(b));
      if (s.size() > r_.size())
        throw TruncatedFile("unterminated string data");
    }
    return s;
  }

  std::string type_at(std::uint32_t idx) const {
    if (idx >= type_ids_size_)
      throw TruncatedFile("type index " + std::to_string(idx) +
                          " out of range");
    return descriptor_to_dotted(string_at(r_.u32(type_ids_off_ + 4u * idx)));
  }

  int proto_param_count(std::uint32_t idx) const {
    if (idx >= proto_ids_size_)
      throw TruncatedFile("proto index " + std::to_string(idx) +
                          " out of range");
    std::uint32_t params_off = r_.u32(proto_ids_off_ + 12u * idx + 8);
    if (params_off == 0) return 0;
    std::uint32_t n = r_.u32(params_off);
    r_.check(params_off + 4, static_cast<size_t>(n) * 2);
    return static_cast<int>(n);
  }

  MethodRef method_at(std::uint32_t idx) const {
    if (idx >= method_ids_size_)
      throw TruncatedFile("method index " + std::to_string(idx) +
                          " out of range");
    size_t off = method_ids_off_ + 8u * idx;
    MethodRef m;
    m.owner_class = type_at(r_.u16(off));
    m.param_count = proto_param_count(r_.u16(off + 2));
    m.method_name = string_at(r_.u32(off + 4));
    return m;
  }

  ClassRecord parse_class_def(size_t off) {
    ClassRecord rec;
    rec.fqn = type_at(r_.u32(off));
    rec.package_path = package_of(rec.fqn);
    std::uint32_t class_data_off = r_.u32(off + 24);
    if (class_data_off == 0) return rec;

    size_t p = class_data_off;
    std::uint32_t static_fields = r_.uleb128(p);
    std::uint32_t instance_fields = r_.uleb128(p);
    std::uint32_t direct_methods = r_.uleb128(p);
    std::uint32_t virtual_methods = r_.uleb128(p);
    std::uint64_t total_methods =
        static_cast<std::uint64_t>(direct_methods) + virtual_methods;
    if (total_methods > r_.size())
      throw TruncatedFile("method count exceeds file size");
    for (std::uint64_t i = 0; i < static_fields + instance_fields; ++i) {
      r_.uleb128(p);  // field_idx_diff
      r_.uleb128(p);  // access_flags
    }
    std::map<std::pair<std::string, int>, int> ordinals;
    auto read_methods = [&](std::uint32_t count) {
      std::uint32_t method_idx = 0;
      for (std::uint32_t i = 0; i < count; ++i) {
        method_idx += r_.uleb128(p);
        r_.uleb128(p);  // access_flags
        std::uint32_t code_off = r_.uleb128(p);
        MethodRef m = method_at(method_idx);
        rec.declared_methods.push_back(m);
        if (code_off != 0) parse_code_item(rec, m, code_off, ordinals);
      }
    };
    read_methods(direct_methods);
    read_methods(virtual_methods);
    return rec;
  }

  void parse_code_item(ClassRecord& rec, const MethodRef& caller,
                       std::uint32_t code_off,
                       std::map<std::pair<std::string, int>, int>& ordinals) {
    r_.check(code_off, 16);
    std::uint32_t insns_size = r_.u32(code_off + 12);
    size_t insns = code_off + 16;
    r_.check(insns, static_cast<size_t>(insns_size) * 2);
    int& next_ordinal = ordinals[{caller.method_name, caller.param_count}];
    std::uint32_t i = 0;
    while (i < insns_size) {
      std::uint16_t unit = r_.u16(insns + 2u * i);
      std::uint8_t op = static_cast<std::uint8_t>(unit & 0xff);
      std::uint32_t len;
      if (op == 0x00 && (unit >> 8) != 0) {
        // switch / fill-array payloads
        std::uint16_t kind = unit >> 8;
        if (kind == 0x01) {  // packed-switch-payload
          std::uint32_t size = r_.u16(insns + 2u * (i + 1));
          len = size * 2u + 4u;
        } else if (kind == 0x02) {  // sparse-switch-payload
          std::uint32_t size = r_.u16(insns + 2u * (i + 1));
          len = size * 4u + 2u;
        } else if (kind == 0x03) {  // fill-array-data-payload
          std::uint32_t width = r_.u16(insns + 2u * (i + 1));
          std::uint64_t size = r_.u32(insns + 2u * (i + 2));
          std::uint64_t units = (size * width + 1) / 2 + 4;
          if (units > insns_size) throw TruncatedFile("payload overruns code");
          len = static_cast<std::uint32_t>(units);
        } else {
          throw TruncatedFile("unknown payload kind");
        }
      } else {
        len = kUnitLen[op];
      }
      if (len == 0 || insns_size - i < len)
        throw TruncatedFile("instruction overruns code item");
      if (is_method_invoke(op)) {
        std::uint16_t method_idx = r_.u16(insns + 2u * (i + 1));
        CallSite cs;
        cs.caller = caller;
        cs.callee = method_at(method_idx);
        cs.ordinal = next_ordinal++;
        rec.call_sites.push_back(std::move(cs));
      }
      i += len;
    }
  }

  Reader r_;
  DexOptions options_;
  std::uint32_t string_ids_size_ = 0, string_ids_off_ = 0;
  std::uint32_t type_ids_size_ = 0, type_ids_off_ = 0;
  std::uint32_t proto_ids_size_ = 0, proto_ids_off_ = 0;
  std::uint32_t method_ids_size_ = 0, method_ids_off_ = 0;
  std::uint32_t class_defs_size_ = 0, class_defs_off_ = 0;
};

}  // namespace

std::vector<ClassRecord> parse_dex(std::span<const std::uint8_t> bytes,
                                   const DexOptions& options) {
  if (bytes.size() < 8) throw BadMagic("file shorter than dex magic");
  return DexParser(Reader(bytes), options).parse();
}

}  // namespace adlens
