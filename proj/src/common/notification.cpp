#include "ranslice/common/notification.hpp"

namespace ranslice {

json Notification::toJson() const {
  json plmnList = json::array();
  for (const auto& p : plmns) plmnList.push_back(p.str());
  json j{{"notificationId", id}, {"type", type}, {"source", source}, {"tick", tick}};
  if (!cellId.empty()) j["cellId"] = cellId;
  if (!cellSliceId.empty()) j["cellSliceId"] = cellSliceId;
  if (!ranSliceId.empty()) j["ranSliceId"] = ranSliceId;
  j["plmns"] = plmnList;
  j["data"] = data;
  return j;
}

}  // namespace ranslice
