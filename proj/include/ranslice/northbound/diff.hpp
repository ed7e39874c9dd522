#pragma once

#include <string>
#include <vector>

#include "ranslice/common/error.hpp"

namespace ranslice::northbound {

struct AttributeChange {
  std::string name;
  json before;
  json after;
};

struct ModelChange {
  std::string op;  // added | removed | changed
  std::string dn;
  std::string kind;
  json attributes;  // added/removed objects
  std::vector<AttributeChange> changes;
};

/// Object-by-object difference of two exported models. Meta data (versions,
/// audit log) is ignored.
std::vector<ModelChange> diffModels(const json& before, const json& after);

json toJson(const std::vector<ModelChange>& changes);
std::string toText(const std::vector<ModelChange>& changes);

}  // namespace ranslice::northbound
