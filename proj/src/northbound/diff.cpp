#include "ranslice/northbound/diff.hpp"

#include <map>

#include "ranslice/common/json_reader.hpp"
#include "ranslice/nrm/codec.hpp"
#include "ranslice/nrm/model.hpp"

namespace ranslice::northbound {

namespace {

struct Node {
  std::string kind;
  json attributes;
};

void flatten(const json& j, nrm::ObjectKind kind, const std::string& parentDn, const std::string& path,
             std::vector<std::string>& order, std::map<std::string, Node>& out) {
  if (!j.is_object()) parseError(path, "expected object");
  const char* idKey = nrm::codec::idField(kind);
  if (!j.contains(idKey) || !j.at(idKey).is_string()) parseError(path, std::string("missing ") + idKey);
  const std::string kindName(nrm::toString(kind));
  const std::string dn = (parentDn.empty() ? "" : parentDn + ",") + kindName + "=" + j.at(idKey).get<std::string>();
  Node node{kindName, json::object()};
  std::vector<std::pair<nrm::ObjectKind, const json*>> children;
  for (const auto& [key, value] : j.items()) {
    if (auto child = nrm::parseObjectKind(key); child && value.is_array()) {
      children.emplace_back(*child, &value);
      continue;
    }
    node.attributes[key] = value;
  }
  order.push_back(dn);
  out[dn] = std::move(node);
  for (const auto& [childKind, list] : children)
    for (std::size_t i = 0; i < list->size(); ++i)
      flatten((*list)[i], childKind, dn, path + "/" + std::string(nrm::toString(childKind)) + "/" + std::to_string(i),
              order, out);
}

void load(const json& doc, std::vector<std::string>& order, std::map<std::string, Node>& out) {
  if (!doc.is_object() || !doc.contains("subnetwork")) parseError("", "not an exported model (missing subnetwork)");
  flatten(doc.at("subnetwork"), nrm::ObjectKind::Subnetwork, "", "/subnetwork", order, out);
}

}  // namespace

std::vector<ModelChange> diffModels(const json& before, const json& after) {
  std::vector<std::string> orderA, orderB;
  std::map<std::string, Node> a, b;
  load(before, orderA, a);
  load(after, orderB, b);
  std::vector<ModelChange> out;
  for (const auto& dn : orderA)
    if (!b.count(dn)) out.push_back({"removed", dn, a[dn].kind, a[dn].attributes, {}});
  for (const auto& dn : orderB) {
    const auto& nb = b[dn];
    auto it = a.find(dn);
    if (it == a.end()) {
      out.push_back({"added", dn, nb.kind, nb.attributes, {}});
      continue;
    }
    ModelChange c{"changed", dn, nb.kind, json(), {}};
    const auto& na = it->second.attributes;
    for (const auto& [key, value] : na.items())
      if (!nb.attributes.contains(key)) c.changes.push_back({key, value, json()});
    for (const auto& [key, value] : nb.attributes.items())
      if (!na.contains(key) || na.at(key) != value) c.changes.push_back({key, na.value(key, json()), value});
    if (!c.changes.empty()) out.push_back(std::move(c));
  }
  return out;
}

json toJson(const std::vector<ModelChange>& changes) {
  json out = json::array();
  for (const auto& c : changes) {
    json j{{"op", c.op}, {"dn", c.dn}, {"kind", c.kind}};
    if (c.op == "changed") {
      json attrs = json::array();
      for (const auto& a : c.changes) attrs.push_back({{"name", a.name}, {"before", a.before}, {"after", a.after}});
      j["changes"] = attrs;
    } else {
      j["attributes"] = c.attributes;
    }
    out.push_back(j);
  }
  return out;
}

std::string toText(const std::vector<ModelChange>& changes) {
  std::string out;
  for (const auto& c : changes) {
    if (c.op == "added") {
      out += "+ " + c.dn + "\n";
    } else if (c.op == "removed") {
      out += "- " + c.dn + "\n";
    } else {
      out += "~ " + c.dn + "\n";
      for (const auto& a : c.changes)
        out += "    " + a.name + ": " + a.before.dump() + " -> " + a.after.dump() + "\n";
    }
  }
  return out;
}

}  // namespace ranslice::northbound
