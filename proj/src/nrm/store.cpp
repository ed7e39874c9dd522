#include "ranslice/nrm/store.hpp"

#include <set>
#include <tuple>

#include "ranslice/nrm/codec.hpp"

namespace ranslice::nrm {

namespace {

json violationList(const std::vector<Violation>& vs) {
  json list = json::array();
  for (const auto& v : vs) list.push_back(v.toJson());
  return list;
}

}  // namespace

std::vector<Violation> introducedViolations(const Model& before, const Model& after, CommitPolicy policy) {
  auto key = [](const Violation& v) { return std::tie(v.path, v.ruleId); };
  std::set<std::tuple<std::string, std::string>> old;
  for (const auto& v : validate(before)) old.insert(key(v));
  std::vector<Violation> out;
  for (const auto& v : validate(after)) {
    if (v.severity != Severity::Error) continue;
    if (policy == CommitPolicy::LocalRules && v.tier != RuleTier::Local) continue;
    if (!old.count(key(v))) out.push_back(v);
  }
  return out;
}

ModelStore::ModelStore(std::string subnetworkId, ModelSettings settings) {
  Model m;
  m.subnetwork.id = std::move(subnetworkId);
  m.settings = std::move(settings);
  current_ = std::make_shared<const Model>(std::move(m));
}

ModelStore::ModelStore(Model model) : current_(std::make_shared<const Model>(std::move(model))) {}

std::shared_ptr<const Model> ModelStore::snapshot() const {
  std::lock_guard lock(readMutex_);
  return current_;
}

void ModelStore::publish(std::shared_ptr<const Model> next) {
  std::lock_guard lock(readMutex_);
  current_ = std::move(next);
}

std::uint64_t ModelStore::commit(Transaction& tx, CommitPolicy policy) {
  std::lock_guard writer(writeMutex_);
  auto now = snapshot();
  if (now->version != tx.baseVersion())
    throw Error(ErrorCode::StaleVersion,
                "model moved from version " + std::to_string(tx.baseVersion()) + " to " +
                    std::to_string(now->version) + " during the transaction",
                {{"baseVersion", tx.baseVersion()}, {"currentVersion", now->version}});
  auto introduced = introducedViolations(tx.base(), tx.model(), policy);
  if (!introduced.empty())
    throw Error(ErrorCode::InvariantViolation,
                introduced.front().path + ": " + introduced.front().message +
                    (introduced.size() > 1 ? " (+" + std::to_string(introduced.size() - 1) + " more)" : ""),
                {{"violations", violationList(introduced)}});
  const auto version = tx.working_.version;
  publish(std::make_shared<const Model>(std::move(tx.working_)));
  return version;
}

Dn ModelStore::createManagedObject(const Dn& parent, ObjectKind kind, const json& attributes) {
  auto tx = begin();
  auto dn = tx.create(parent, kind, attributes);
  commit(tx, CommitPolicy::LocalRules);
  return dn;
}

Dn ModelStore::updateManagedObject(const Dn& ref, const json& deltas, std::optional<std::uint64_t> baseVersion) {
  auto tx = begin();
  if (baseVersion) {
    const auto& versions = tx.base().objectVersions;
    auto it = versions.find(ref.str());
    const std::uint64_t current = it == versions.end() ? 0 : it->second;
    if (current != *baseVersion)
      throw Error(ErrorCode::StaleVersion,
                  ref.str() + " is at version " + std::to_string(current) + ", update was based on " +
                      std::to_string(*baseVersion),
                  {{"objectVersion", current}, {"baseVersion", *baseVersion}});
  }
  tx.update(ref, deltas);
  commit(tx, CommitPolicy::LocalRules);
  return ref;
}

void ModelStore::deleteManagedObject(const Dn& ref) {
  auto tx = begin();
  tx.remove(ref);
  commit(tx, CommitPolicy::LocalRules);
}

json ModelStore::getModelTree(const Dn& root, int depth) const {
  auto snap = snapshot();
  json tree = codec::subtree(*snap, root, depth);
  return {{"version", snap->version}, {"dn", root.str()}, {"tree", tree}};
}

std::vector<Violation> ModelStore::validateModel(bool includeInfo) const { return validate(*snapshot(), includeInfo); }

json ModelStore::exportModel() const { return codec::exportModel(*snapshot()); }

void ModelStore::importModel(const json& document) { replace(codec::importModel(document)); }

void ModelStore::replace(Model model) {
  std::lock_guard writer(writeMutex_);
  publish(std::make_shared<const Model>(std::move(model)));
}

}  // namespace ranslice::nrm
