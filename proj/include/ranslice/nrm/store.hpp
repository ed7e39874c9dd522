#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "ranslice/nrm/model.hpp"

namespace ranslice::nrm {

class ModelStore;

/// A private working copy of the model. Mutations accumulate here and
/// become visible only through ModelStore::commit.
class Transaction {
 public:
  const Model& model() const { return working_; }
  std::uint64_t baseVersion() const { return base_->version; }
  const Model& base() const { return *base_; }

  Dn create(const Dn& parent, ObjectKind kind, const json& attributes) {
    return createObject(working_, parent, kind, attributes);
  }
  void update(const Dn& ref, const json& deltas, bool internal = false) {
    updateObject(working_, ref, deltas, internal);
  }
  void remove(const Dn& ref) { deleteObject(working_, ref); }

 private:
  friend class ModelStore;
  explicit Transaction(std::shared_ptr<const Model> base) : base_(std::move(base)), working_(*base_) {}

  std::shared_ptr<const Model> base_;
  Model working_;
};

enum class CommitPolicy {
  LocalRules,  // raw CM writes: no new Local-tier errors
  AllRules,    // LCM transactions: no new errors of any tier
};

/// Serialized-writer store with immutable snapshots. Readers take a
/// shared_ptr to the current model; writers replace it atomically.
class ModelStore {
 public:
  explicit ModelStore(std::string subnetworkId, ModelSettings settings = {});
  explicit ModelStore(Model model);

  std::shared_ptr<const Model> snapshot() const;
  std::uint64_t version() const { return snapshot()->version; }

  Dn createManagedObject(const Dn& parent, ObjectKind kind, const json& attributes);
  /// `baseVersion` is the object version the caller last read; a mismatch
  /// raises StaleVersion.
  Dn updateManagedObject(const Dn& ref, const json& deltas,
                         std::optional<std::uint64_t> baseVersion = std::nullopt);
  void deleteManagedObject(const Dn& ref);

  json getModelTree(const Dn& root, int depth = -1) const;
  std::vector<Violation> validateModel(bool includeInfo = false) const;
  json exportModel() const;
  /// Replaces the whole content with an imported document.
  void importModel(const json& document);
  void replace(Model model);

  Transaction begin() const { return Transaction(snapshot()); }
  /// Publishes the transaction. Throws StaleVersion if another write landed
  /// since begin(), InvariantViolation if the transaction introduced errors.
  std::uint64_t commit(Transaction& tx, CommitPolicy policy);

 private:
  void publish(std::shared_ptr<const Model> next);

  mutable std::mutex readMutex_;
  std::mutex writeMutex_;
  std::shared_ptr<const Model> current_;
};

/// Violations present in `after` but not in `before`, restricted by policy.
std::vector<Violation> introducedViolations(const Model& before, const Model& after,
                                            CommitPolicy policy);

}  // namespace ranslice::nrm
