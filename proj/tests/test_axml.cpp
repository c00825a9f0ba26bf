#include <doctest.h>

#include <fstream>
#include <vector>

#include "adlens/errors.hpp"
#include "adlens/frontend.hpp"

using namespace adlens;

#ifndef ADLENS_FIXTURE_DIR
#error "ADLENS_FIXTURE_DIR must be defined by the build"
#endif

namespace {

std::vector<std::uint8_t> read_file(const std::string& name) {
  std::ifstream f(std::string(ADLENS_FIXTURE_DIR) + "/" + name,
                  std::ios::binary);
  REQUIRE(f.good());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::span<const std::uint8_t> span_of(const std::vector<std::uint8_t>& v) {
  return {v.data(), v.size()};
}

const ManifestInfo kExpected{
    "com.example.demo",
    {"com.example.demo.MainActivity", "com.example.demo.Settings",
     "com.other.FullName"}};

}  // namespace

TEST_CASE("binary manifest, utf-8 string pool") {
  auto bytes = read_file("manifest_utf8.axml");
  CHECK(parse_manifest(span_of(bytes)) == kExpected);
}

TEST_CASE("binary manifest, utf-16 string pool") {
  auto bytes = read_file("manifest_utf16.axml");
  CHECK(parse_manifest(span_of(bytes)) == kExpected);
}

TEST_CASE("binary manifest without package attribute") {
  auto bytes = read_file("manifest_nopkg.axml");
  CHECK_THROWS_AS(parse_manifest(span_of(bytes)), MissingPackageAttr);
}

TEST_CASE("plaintext manifest fallback with name resolution") {
  std::string xml =
      "<?xml version=\"1.0\"?>\n"
      "<manifest package=\"org.demo\">\n"
      "  <application android:label=\"x\">\n"
      "    <activity android:name=\".Rel\"/>\n"
      "    <activity android:name=\"Bare\"/>\n"
      "    <activity android:name=\"com.abs.Q\"/>\n"
      "  </application>\n"
      "</manifest>\n";
  std::vector<std::uint8_t> bytes(xml.begin(), xml.end());
  ManifestInfo info = parse_manifest(span_of(bytes));
  CHECK(info.package_name == "org.demo");
  CHECK(info.activities ==
        std::vector<std::string>{"org.demo.Rel", "org.demo.Bare", "com.abs.Q"});
}

TEST_CASE("plaintext manifest without package attribute") {
  std::string xml = "<manifest versionName=\"1\"/>";
  std::vector<std::uint8_t> bytes(xml.begin(), xml.end());
  CHECK_THROWS_AS(parse_manifest(span_of(bytes)), MissingPackageAttr);
}

TEST_CASE("garbage input raises a structured error") {
  std::vector<std::uint8_t> junk = {0x03, 0x00, 0x08, 0x00, 0xff, 0xff};
  CHECK_THROWS_AS(parse_manifest(span_of(junk)), Error);
  std::vector<std::uint8_t> notxml = {0xde, 0xad, 0xbe, 0xef};
  CHECK_THROWS_AS(parse_manifest(span_of(notxml)), Error);
}

TEST_CASE("truncated binary manifest raises BadChunk") {
  auto bytes = read_file("manifest_utf8.axml");
  // chop inside the element chunks but keep the document size field intact:
  // the declared chunk walk must hit the bounds check, not read past the end
  bytes.resize(bytes.size() - 10);
  CHECK_THROWS_AS(parse_manifest(span_of(bytes)), BadChunk);
}
