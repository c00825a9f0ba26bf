#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "adlens/errors.hpp"
#include "adlens/frontend.hpp"
#include "adlens/rng.hpp"
#include "dex_builder.hpp"

using namespace adlens;
using namespace dexbuild;
namespace fs = std::filesystem;

namespace {

std::span<const std::uint8_t> span_of(const std::vector<std::uint8_t>& v) {
  return {v.data(), v.size()};
}

}  // namespace

TEST_CASE("single class with one invoke-virtual") {
  DexBuilder b;
  std::uint32_t target = b.method("Lcom/lib/Widget;", "show", 2);
  std::vector<std::uint16_t> code;
  append(code, ins_const16());
  append(code, ins_invoke(0x6e, static_cast<std::uint16_t>(target)));
  append(code, ins_return_void());
  b.add_method("Lcom/app/Main;", "onCreate", 1, code);
  auto bytes = b.build();

  auto classes = parse_dex(span_of(bytes));
  REQUIRE(classes.size() == 1);
  const ClassRecord& c = classes[0];
  CHECK(c.fqn == "com.app.Main");
  CHECK(c.package_path == "com.app");
  REQUIRE(c.declared_methods.size() == 1);
  CHECK(c.declared_methods[0] == MethodRef{"com.app.Main", "onCreate", 1});
  REQUIRE(c.call_sites.size() == 1);
  CHECK(c.call_sites[0].caller == MethodRef{"com.app.Main", "onCreate", 1});
  CHECK(c.call_sites[0].callee == MethodRef{"com.lib.Widget", "show", 2});
  CHECK(c.call_sites[0].ordinal == 0);
}

TEST_CASE("every invoke opcode family is recorded; invoke-custom is not") {
  DexBuilder b;
  std::uint32_t t0 = b.method("Lcom/lib/A;", "f", 0);
  std::uint32_t proto1 = b.proto(1);
  std::vector<std::uint16_t> code;
  // 35c family
  for (std::uint8_t op = 0x6e; op <= 0x72; ++op)
    append(code, ins_invoke(op, static_cast<std::uint16_t>(t0)));
  // 3rc family
  for (std::uint8_t op = 0x74; op <= 0x78; ++op)
    append(code, ins_invoke_range(op, static_cast<std::uint16_t>(t0)));
  // invoke-polymorphic carries a real method index
  append(code, ins_invoke_poly(0xfa, static_cast<std::uint16_t>(t0),
                               static_cast<std::uint16_t>(proto1)));
  append(code, ins_invoke_poly(0xfb, static_cast<std::uint16_t>(t0),
                               static_cast<std::uint16_t>(proto1)));
  // invoke-custom's index is a call_site_id, not a method_id: must be skipped
  append(code, {0x00fc, 0x0000, 0x0000});
  append(code, ins_return_void());
  b.add_method("Lcom/app/Caller;", "run", 0, code);
  auto bytes = b.build();

  auto classes = parse_dex(span_of(bytes));
  REQUIRE(classes.size() == 1);
  REQUIRE(classes[0].call_sites.size() == 12);
  for (int i = 0; i < 12; ++i) {
    CHECK(classes[0].call_sites[static_cast<size_t>(i)].callee ==
          MethodRef{"com.lib.A", "f", 0});
    CHECK(classes[0].call_sites[static_cast<size_t>(i)].ordinal == i);
  }
}

TEST_CASE("payload pseudo-instructions are skipped by their real length") {
  DexBuilder b;
  std::uint32_t t = b.method("Lcom/lib/B;", "g", 0);
  std::vector<std::uint16_t> code;
  append(code, packed_switch_payload(3));
  append(code, sparse_switch_payload(2));
  append(code, fill_array_payload(4, 5));
  append(code, ins_invoke(0x6e, static_cast<std::uint16_t>(t)));
  b.add_method("Lcom/app/C;", "m", 0, code);
  auto classes = parse_dex(span_of(b.build()));
  REQUIRE(classes[0].call_sites.size() == 1);
  CHECK(classes[0].call_sites[0].callee.method_name == "g");
}

TEST_CASE("ordinals are per caller method") {
  DexBuilder b;
  std::uint32_t t = b.method("Lcom/lib/D;", "h", 0);
  std::vector<std::uint16_t> one;
  append(one, ins_invoke(0x6e, static_cast<std::uint16_t>(t)));
  append(one, ins_invoke(0x6e, static_cast<std::uint16_t>(t)));
  std::vector<std::uint16_t> two;
  append(two, ins_invoke(0x6e, static_cast<std::uint16_t>(t)));
  b.add_method("Lcom/app/E;", "m1", 0, one);
  b.add_method("Lcom/app/E;", "m2", 0, two);
  auto classes = parse_dex(span_of(b.build()));
  REQUIRE(classes[0].call_sites.size() == 3);
  std::map<std::string, std::vector<int>> by_caller;
  for (const auto& cs : classes[0].call_sites)
    by_caller[cs.caller.method_name].push_back(cs.ordinal);
  CHECK(by_caller["m1"] == std::vector<int>{0, 1});
  CHECK(by_caller["m2"] == std::vector<int>{0});
}

TEST_CASE("multiple classes and methods without code") {
  DexBuilder b;
  b.add_method("Lcom/app/F;", "native_like", 0);  // no code body
  b.add_class("Lcom/app/Marker;");                // no methods at all
  std::uint32_t t = b.method("Lcom/lib/G;", "go", 3);
  std::vector<std::uint16_t> code;
  append(code, ins_invoke_range(0x74, static_cast<std::uint16_t>(t)));
  b.add_method("Lcom/app/H;", "m", 2, code);
  auto classes = parse_dex(span_of(b.build()));
  REQUIRE(classes.size() == 3);
  CHECK(classes[0].fqn == "com.app.F");
  CHECK(classes[0].call_sites.empty());
  CHECK(classes[1].fqn == "com.app.Marker");
  CHECK(classes[1].declared_methods.empty());
  CHECK(classes[2].call_sites.size() == 1);
  CHECK(classes[2].call_sites[0].callee.param_count == 3);
}

TEST_CASE("all dex versions 035..039 accepted; others rejected") {
  DexBuilder b;
  b.add_method("La/B;", "m", 0);
  for (const char* v : {"035", "036", "037", "038", "039"})
    CHECK(parse_dex(span_of(b.build(v))).size() == 1);
  CHECK_THROWS_AS(parse_dex(span_of(b.build("034"))), UnsupportedVersion);
  CHECK_THROWS_AS(parse_dex(span_of(b.build("040"))), UnsupportedVersion);
}

TEST_CASE("bad magic and short input") {
  std::vector<std::uint8_t> junk = {'P', 'K', 3, 4, 0, 0, 0, 0, 0};
  CHECK_THROWS_AS(parse_dex(span_of(junk)), BadMagic);
  std::vector<std::uint8_t> tiny = {'d', 'e', 'x'};
  CHECK_THROWS_AS(parse_dex(span_of(tiny)), BadMagic);
  DexBuilder b;
  b.add_method("La/B;", "m", 0);
  auto bytes = b.build();
  bytes.resize(bytes.size() / 2);
  CHECK_THROWS_AS(parse_dex(span_of(bytes)), TruncatedFile);
}

TEST_CASE("checksum verification is flag-gated") {
  DexBuilder b;
  b.str("canary_string");  // unused payload we can safely corrupt
  b.add_method("La/B;", "m", 0);
  auto bytes = b.build();
  // flip one character inside the unused string: parse still succeeds but
  // the stored checksum no longer matches
  const std::string needle = "canary_string";
  auto it = std::search(bytes.begin(), bytes.end(), needle.begin(),
                        needle.end());
  REQUIRE(it != bytes.end());
  *(it + 2) ^= 0x01;
  CHECK_NOTHROW(parse_dex(span_of(bytes)));
  DexOptions verify;
  verify.verify_checksum = true;
  CHECK_THROWS_AS(parse_dex(span_of(bytes), verify), TruncatedFile);
  // a correct checksum passes verification
  CHECK_NOTHROW(parse_dex(span_of(b.build()), verify));
}

TEST_CASE("byte fuzz: structured errors only") {
  DexBuilder b;
  std::uint32_t t = b.method("Lcom/lib/X;", "show", 1);
  std::vector<std::uint16_t> code;
  append(code, packed_switch_payload(2));
  append(code, ins_invoke(0x6e, static_cast<std::uint16_t>(t)));
  append(code, ins_return_void());
  b.add_method("Lcom/app/Y;", "m", 0, code);
  const auto base = b.build();

  Rng rng(2024);
  int parsed = 0, rejected = 0;
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::uint8_t> mutant = base;
    if (rng.below(8) == 0)
      mutant.resize(rng.below(mutant.size()) + 1);
    int flips = static_cast<int>(rng.below(8)) + 1;
    for (int k = 0; k < flips; ++k)
      mutant[rng.below(mutant.size())] =
          static_cast<std::uint8_t>(rng.below(256));
    try {
      parse_dex(span_of(mutant));
      ++parsed;
    } catch (const Error&) {
      ++rejected;
    }
    // anything else (segfault, std::bad_alloc, infinite loop) fails the test
  }
  CHECK(parsed + rejected == 2000);
  CHECK(rejected > 0);
}

TEST_CASE("parse_update_dir merges multidex and reads the manifest") {
  fs::path dir = fs::temp_directory_path() / "adlens_test_updatedir";
  fs::remove_all(dir);
  fs::create_directories(dir / "lib" / "arm64-v8a");

  DexBuilder d1;
  std::uint32_t t = d1.method("Lcom/lib/Z;", "show", 0);
  std::vector<std::uint16_t> code;
  append(code, ins_invoke(0x6e, static_cast<std::uint16_t>(t)));
  d1.add_method("Lcom/app/Main;", "onCreate", 1, code);
  DexBuilder d2;
  d2.add_method("Lcom/app/Extra;", "m", 0);
  // duplicate of a classes.dex class: first definition wins, with a warning
  d2.add_method("Lcom/app/Main;", "shadow", 9);
  auto write = [&](const char* name, const std::vector<std::uint8_t>& v) {
    std::ofstream f(dir / name, std::ios::binary);
    f.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size()));
  };
  write("classes.dex", d1.build());
  write("classes2.dex", d2.build());
  {
    std::ofstream m(dir / "AndroidManifest.xml");
    m << "<manifest package=\"com.app\"><application>"
         "<activity android:name=\".Main\"/>"
         "</application></manifest>";
  }
  { std::ofstream so(dir / "lib" / "arm64-v8a" / "libnative.so"); }

  UpdateDirMeta meta;
  meta.app_id = "com.app";
  meta.version_code = 7;
  std::vector<std::string> warnings;
  AppUpdate u = parse_update_dir(dir, meta, {}, &warnings);
  CHECK(u.version_code == 7);
  CHECK(u.classes.count("com.app.Main") == 1);
  CHECK(u.classes.count("com.app.Extra") == 1);
  CHECK(u.classes.at("com.app.Main").declared_methods[0].method_name ==
        "onCreate");  // classes.dex definition won
  CHECK(u.activities == std::set<std::string>{"com.app.Main"});
  CHECK(u.has_native_code);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("com.app.Main") != std::string::npos);

  fs::remove(dir / "classes.dex");
  fs::remove(dir / "classes2.dex");
  CHECK_THROWS_AS(parse_update_dir(dir, meta), NoDexFound);
}
