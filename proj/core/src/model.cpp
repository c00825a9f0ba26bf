#include "adlens/model.hpp"

namespace adlens {

std::string package_of(std::string_view fqn) {
  auto pos = fqn.rfind('.');
  if (pos == std::string_view::npos) return {};
  return std::string(fqn.substr(0, pos));
}

std::string simple_name_of(std::string_view fqn) {
  auto pos = fqn.rfind('.');
  if (pos == std::string_view::npos) return std::string(fqn);
  return std::string(fqn.substr(pos + 1));
}

bool under_prefix(std::string_view fqn, std::string_view prefix) {
  if (prefix.empty()) return false;
  if (fqn.size() < prefix.size()) return false;
  if (fqn.compare(0, prefix.size(), prefix) != 0) return false;
  return fqn.size() == prefix.size() || fqn[prefix.size()] == '.';
}

}  // namespace adlens
