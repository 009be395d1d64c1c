#pragma once

#include <string>

#include "cdr/instance.hpp"

namespace support {

inline std::string fixture(const std::string& name) { return std::string(CDR_FIXTURES) + "/" + name; }

inline cdr::Instance fig1() { return cdr::load_instance(fixture("fig1.json")); }

/// Instance with each packet on its own private chain of the given length.
inline cdr::Instance chain(std::int64_t length, const std::string& prefix = "c") {
  cdr::Instance inst;
  for (std::int64_t v = 0; v <= length; ++v) inst.nodes.push_back(prefix + std::to_string(v));
  cdr::Path p;
  for (std::int64_t e = 1; e <= length; ++e) {
    const auto id = prefix + "e" + std::to_string(e);
    inst.edges.push_back({id, inst.nodes[e - 1], inst.nodes[e]});
    p.push_back(id);
  }
  inst.paths.push_back(p);
  return inst;
}

}  // namespace support
