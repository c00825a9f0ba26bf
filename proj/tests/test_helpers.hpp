#pragma once

#include <string>
#include <vector>

#include "adlens/model.hpp"

namespace testutil {

inline adlens::ClassRecord& cls(adlens::AppUpdate& u, const std::string& fqn) {
  auto it = u.classes.find(fqn);
  if (it == u.classes.end()) {
    adlens::ClassRecord c;
    c.fqn = fqn;
    c.package_path = adlens::package_of(fqn);
    it = u.classes.emplace(fqn, std::move(c)).first;
  }
  return it->second;
}

inline void declare(adlens::AppUpdate& u, const std::string& fqn,
                    const std::string& name, int params) {
  cls(u, fqn).declared_methods.push_back({fqn, name, params});
}

inline void call(adlens::AppUpdate& u, const std::string& caller_fqn,
                 const std::string& caller_method, int caller_params,
                 const std::string& callee_fqn,
                 const std::string& callee_method, int callee_params) {
  adlens::ClassRecord& c = cls(u, caller_fqn);
  adlens::CallSite cs;
  cs.caller = {caller_fqn, caller_method, caller_params};
  cs.callee = {callee_fqn, callee_method, callee_params};
  cs.ordinal = static_cast<int>(c.call_sites.size());
  c.call_sites.push_back(cs);
}

inline adlens::AppUpdate base_update(const std::string& app_id,
                                     std::int64_t version) {
  adlens::AppUpdate u;
  u.app_id = app_id;
  u.version_code = version;
  u.observed_at = 1600000000;
  u.category = "Tools";
  u.download_count = 5000;
  return u;
}

}  // namespace testutil
