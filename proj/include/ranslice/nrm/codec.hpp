#pragma once

// JSON encoding of the resource model. Attribute names are camelCase;
// contained objects are listed under their PascalCase kind name.

#include <optional>
#include <string>

#include "ranslice/common/error.hpp"
#include "ranslice/nrm/model.hpp"

namespace ranslice::nrm::codec {

enum class LoadScope { Cell, Slice };

json toJson(const PlmnId& v);
json toJson(const SNssai& v);
json toJson(const NetworkId& v);
json toJson(const QosFlowType& v);
json toJson(const AuthorisedLoadEntry& v);
json toJson(const AuthorisedLoad& v);
json toJson(const TargetKpi& v);
json toJson(const PlannedLoadItem& v);

PlmnId parsePlmnId(const json& j, const std::string& path);
SNssai parseSNssai(const json& j, const std::string& path);
NetworkId parseNetworkId(const json& j, const std::string& path);
std::vector<NetworkId> parseNetworkIds(const json& j, const std::string& path);
QosFlowType parseQosFlowType(const json& j, const std::string& path);
std::vector<QosFlowType> parseFlowTypes(const json& j, const std::string& path);

/// Load values accept a plain number, "NN%" (cell scope only), or
/// {"mbps": x}. At cell scope bitrates are converted to a fraction of
/// `cellCapacityMbps`. "N/A" or null means absent.
std::optional<double> parseLoadValue(const json& j, const std::string& path, LoadScope scope,
                                     std::optional<double> cellCapacityMbps);
AuthorisedLoadEntry parseAuthorisedLoadEntry(const json& j, const std::string& path,
                                             LoadScope scope,
                                             std::optional<double> cellCapacityMbps);
AuthorisedLoad parseAuthorisedLoad(const json& j, const std::string& path, LoadScope scope,
                                   std::optional<double> cellCapacityMbps = std::nullopt);
TargetKpi parseTargetKpi(const json& j, const std::string& path);
PlannedLoadItem parsePlannedLoadItem(const json& j, const std::string& path);

GnbKind parseGnbKind(const std::string& text, const std::string& path);
KpiName parseKpiName(const std::string& text, const std::string& path);

/// Attributes of a single object, children excluded.
json attributes(const ManagedElement& v);
json attributes(const GnbFunction& v);
json attributes(const NrCell& v);
json attributes(const CellSlice& v);
json attributes(const RanSlice& v);
json attributes(const Subnetwork& v);

ManagedElement parseManagedElement(const json& attrs, const std::string& path);
GnbFunction parseGnbFunction(const json& attrs, const std::string& path);
NrCell parseNrCell(const json& attrs, const std::string& path);
CellSlice parseCellSlice(const json& attrs, const std::string& path,
                         std::optional<double> cellCapacityMbps);
RanSlice parseRanSlice(const json& attrs, const std::string& path);

/// Identifier attribute name of a kind ("id", "cellId", ...).
const char* idField(ObjectKind kind);

/// Snapshot of the subtree rooted at `root`. depth 0 = node only, negative =
/// unlimited.
json subtree(const Model& model, const Dn& root, int depth);

json exportModel(const Model& model);
/// Parses and validates a document produced by exportModel. Throws
/// ParseError (with location) or InvariantViolation.
Model importModel(const json& document);
Model importModel(const std::string& text);

}  // namespace ranslice::nrm::codec
