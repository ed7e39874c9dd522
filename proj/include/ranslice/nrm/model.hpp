#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ranslice/common/error.hpp"
#include "ranslice/nrm/types.hpp"

namespace ranslice::nrm {

enum class ObjectKind { Subnetwork, ManagedElement, GnbFunction, NrCell, CellSlice, RanSlice };

std::string_view toString(ObjectKind kind);
std::optional<ObjectKind> parseObjectKind(std::string_view text);
bool isLegalChild(ObjectKind parent, ObjectKind child);
std::vector<ObjectKind> childKinds(ObjectKind parent);

struct Rdn {
  ObjectKind kind;
  std::string id;

  auto operator<=>(const Rdn&) const = default;
};

/// Distinguished name, e.g.
/// "Subnetwork=NH,ManagedElement=ME1,GnbFunction=gNB#1,NrCell=NRCell#1".
class Dn {
 public:
  Dn() = default;
  explicit Dn(std::vector<Rdn> rdns) : rdns_(std::move(rdns)) {}

  static Dn parse(std::string_view text);

  std::string str() const;
  Dn child(ObjectKind kind, std::string id) const;
  Dn parent() const;
  const Rdn& leaf() const { return rdns_.back(); }
  bool empty() const { return rdns_.empty(); }
  std::size_t depth() const { return rdns_.size(); }
  const std::vector<Rdn>& rdns() const { return rdns_; }

  auto operator<=>(const Dn&) const = default;

 private:
  std::vector<Rdn> rdns_;
};

struct ModelSettings {
  double spectralEfficiency = 5.0;  // bit/s/Hz
  std::vector<std::string> rstCatalog{"eMBB", "URLLC", "mMTC"};

  bool hasRst(const std::string& rst) const;
  bool operator==(const ModelSettings&) const = default;
};

/// One applied mutation. Create/update entries carry the object's resulting
/// attributes so the log replays to the identical tree.
struct AuditEntry {
  std::uint64_t version = 0;
  std::string op;  // create | update | delete
  std::string dn;
  ObjectKind kind = ObjectKind::Subnetwork;
  json attributes;

  bool operator==(const AuditEntry&) const = default;
};

struct Model {
  Subnetwork subnetwork;
  ModelSettings settings;
  std::uint64_t version = 0;
  std::map<std::string, std::uint64_t> objectVersions;  // DN -> version of last change
  std::vector<AuditEntry> auditLog;

  Dn rootDn() const { return Dn({{ObjectKind::Subnetwork, subnetwork.id}}); }

  const NrCell* findCell(const std::string& cellId) const;
  NrCell* findCell(const std::string& cellId);
  const GnbFunction* findFunction(const std::string& id) const;
  const ManagedElement* findManagedElement(const std::string& id) const;
  const RanSlice* findRanSlice(const std::string& id) const;
  RanSlice* findRanSlice(const std::string& id);
  std::optional<Dn> cellDn(const std::string& cellId) const;
  const GnbFunction* servingFunction(const std::string& cellId) const;

  /// Cells in tree order.
  std::vector<const NrCell*> cells() const;
  /// Owning RanSlice id of a cell slice, if any.
  std::optional<std::string> ownerOf(const std::string& cellId, const std::string& cellSliceId) const;

  double cellCapacityMbps(const NrCell& cell) const {
    return cell.channelBandwidthMHz * settings.spectralEfficiency;
  }

  bool operator==(const Model&) const = default;
};

/// Structural equality of the managed object trees (ignores meta).
inline bool sameTree(const Model& a, const Model& b) {
  return a.subnetwork == b.subnetwork;
}

enum class Severity { Error, Info };

/// Local rules are checked on every mutation; referential rules on
/// transactional commits and whole-model validation.
enum class RuleTier { Local, Referential };

struct Violation {
  std::string path;
  std::string ruleId;
  std::string message;
  Severity severity = Severity::Error;
  RuleTier tier = RuleTier::Local;

  json toJson() const;
  bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate(const Model& model, bool includeInfo = false);

struct FlowTypeGuarantee {
  QosFlowType flowType;
  double guaranteedSum = 0.0;
};

/// Per flow type mentioned in the cell, the sum of guaranteed fractions over
/// every cell-slice AL entry whose scope covers it.
std::vector<FlowTypeGuarantee> guaranteedSums(const NrCell& cell);

inline constexpr double kFeasibilityTolerance = 1e-9;

// Mutations on a model value. Each bumps the model version, stamps the
// object version and appends an audit entry. Only Local invariants of the
// touched objects are enforced by the caller (see ModelStore).

Dn createObject(Model& model, const Dn& parent, ObjectKind kind, const json& attributes);
/// `internal` lifts the writable-attribute restriction (used by LCM and replay).
void updateObject(Model& model, const Dn& ref, const json& deltas, bool internal = false);
void deleteObject(Model& model, const Dn& ref);

/// Writable attributes for updateManagedObject.
const std::vector<std::string>& writableAttributes(ObjectKind kind);

bool exists(const Model& model, const Dn& ref);

/// Re-applies an audit log from an empty tree with the given root id.
Model replayAuditLog(const std::string& subnetworkId, const ModelSettings& settings,
                     const std::vector<AuditEntry>& log);

}  // namespace ranslice::nrm
