#include <doctest.h>

#include "adlens/model.hpp"

using namespace adlens;

TEST_CASE("package_of splits at the last dot") {
  CHECK(package_of("com.foo.Bar") == "com.foo");
  CHECK(package_of("Bar") == "");
  CHECK(package_of("a.b") == "a");
  CHECK(package_of("a.b.C$D") == "a.b");
}

TEST_CASE("simple_name_of keeps inner-class markers") {
  CHECK(simple_name_of("com.foo.Bar") == "Bar");
  CHECK(simple_name_of("Bar") == "Bar");
  CHECK(simple_name_of("a.b.C$D") == "C$D");
}

TEST_CASE("under_prefix requires a package boundary") {
  CHECK(under_prefix("com.foo.Bar", "com.foo"));
  CHECK(under_prefix("com.foo", "com.foo"));
  CHECK_FALSE(under_prefix("com.foobar.Baz", "com.foo"));
  CHECK_FALSE(under_prefix("com.fo", "com.foo"));
  CHECK_FALSE(under_prefix("org.foo.Bar", "com.foo"));
}

TEST_CASE("MethodRef ordering is lexicographic over fields") {
  MethodRef a{"a.B", "m", 1};
  MethodRef b{"a.B", "m", 2};
  MethodRef c{"a.C", "a", 0};
  CHECK(a < b);
  CHECK(b < c);
  CHECK(a == MethodRef{"a.B", "m", 1});
}
