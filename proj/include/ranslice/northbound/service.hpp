#pragma once

// The management service behind both the HTTP API and the scenario runner.
// Every LCM mutation enters through `lcm`, so both fronts validate alike.

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "ranslice/enforcement/simulator.hpp"
#include "ranslice/infra/infrastructure.hpp"
#include "ranslice/lifecycle/lifecycle.hpp"
#include "ranslice/northbound/scenario.hpp"
#include "ranslice/nrm/store.hpp"
#include "ranslice/pmfm/notifications.hpp"

namespace ranslice::northbound {

class Service {
 public:
  /// Empty model and infrastructure.
  Service();
  /// Builds infrastructure, network services, bindings and the initial
  /// model of a scenario. The timeline is not applied.
  explicit Service(const Scenario& scenario);

  /// operation: createRsi | modifyRsi | scaleRsiCapacity | terminateRsi.
  /// Request bodies are those of the corresponding API calls. Emits an
  /// LcmOperationCompleted/Failed notification either way.
  lifecycle::LcmResult lcm(const std::string& operation, const std::string& ranSliceId, const json& request);

  void registerTemplate(const json& body);
  nrm::Dn updateManagedObject(const std::string& dn, const json& deltas,
                              std::optional<std::uint64_t> baseVersion = std::nullopt);
  void degradeCell(const std::string& cellId, double factor);
  void restoreCell(const std::string& cellId);

  /// Simulates the next tick against the current model snapshot.
  enforcement::TickResult step();
  std::int64_t nextTick() const;
  std::optional<std::int64_t> horizon() const { return sim_.profiles().horizon(); }

  std::shared_ptr<const nrm::Model> model() const { return store_.snapshot(); }
  nrm::ModelStore& store() { return store_; }
  json exportModel() const { return store_.exportModel(); }
  json infrastructureJson() const;
  lifecycle::LifecycleManager& lifecycle() { return *lcm_; }
  const lifecycle::LifecycleManager& lifecycle() const { return *lcm_; }
  pmfm::PmFm& pmfm() { return pmfm_; }
  const pmfm::PmFm& pmfm() const { return pmfm_; }

 private:
  void notifyLcm(const lifecycle::LcmOperationRecord& record, const std::vector<nrm::PlmnId>& plmns);

  nrm::ModelStore store_;
  infra::Infrastructure infra_;
  std::unique_ptr<lifecycle::LifecycleManager> lcm_;
  enforcement::Simulator sim_;
  pmfm::PmFm pmfm_;
  mutable std::mutex simMutex_;
  std::int64_t nextTick_ = 0;
};

/// Maps an error to its HTTP status.
int httpStatus(ErrorCode code);

}  // namespace ranslice::northbound
