#pragma once

#include <stdexcept>
#include <string>

namespace adlens {

// Base for all toolkit errors. Subtypes carry a stable code string that the
// CLI prints in diagnostics and maps to exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("IoError", what) {}
};

class MalformedLayout : public Error {
 public:
  explicit MalformedLayout(const std::string& what)
      : Error("MalformedLayout", what) {}
};

class DuplicateVersion : public Error {
 public:
  explicit DuplicateVersion(const std::string& what)
      : Error("DuplicateVersion", what) {}
};

// Binary frontend failures (DEX / AXML). The code distinguishes the cause.
class FrontendError : public Error {
 public:
  FrontendError(std::string code, const std::string& what)
      : Error(std::move(code), what) {}
};

class BadMagic : public FrontendError {
 public:
  explicit BadMagic(const std::string& what) : FrontendError("BadMagic", what) {}
};

class TruncatedFile : public FrontendError {
 public:
  explicit TruncatedFile(const std::string& what)
      : FrontendError("TruncatedFile", what) {}
};

class UnsupportedVersion : public FrontendError {
 public:
  explicit UnsupportedVersion(const std::string& what)
      : FrontendError("UnsupportedVersion", what) {}
};

class BadChunk : public FrontendError {
 public:
  explicit BadChunk(const std::string& what) : FrontendError("BadChunk", what) {}
};

class MissingPackageAttr : public FrontendError {
 public:
  explicit MissingPackageAttr(const std::string& what)
      : FrontendError("MissingPackageAttr", what) {}
};

class NoDexFound : public FrontendError {
 public:
  explicit NoDexFound(const std::string& what)
      : FrontendError("NoDexFound", what) {}
};

}  // namespace adlens
