#pragma once

// Northbound notification dispatch: subscriptions with filters, one ordered
// mailbox per subscription, optional push delivery with retries.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ranslice/common/notification.hpp"
#include "ranslice/nrm/model.hpp"
#include "ranslice/pmfm/pm_store.hpp"

namespace ranslice::pmfm {

struct SubscriptionFilter {
  std::vector<std::string> ranSliceIds;        // empty: any slice
  std::vector<std::string> notificationKinds;  // empty or "*": any kind
  std::optional<nrm::PlmnId> tenant;           // PLMN-scoped subscriber

  bool empty() const { return ranSliceIds.empty() && notificationKinds.empty() && !tenant; }
  bool matches(const Notification& n) const;
};

struct Subscription {
  std::string subscriptionId;
  std::string subscriberId;
  SubscriptionFilter filter;
  std::string endpoint;

  json toJson() const;
};

Subscription parseSubscription(const json& j, const std::string& path);

/// Push callback. Throwing counts as a failed attempt. The pair
/// (notification id, subscription id) is the de-duplication key.
using PushHandler = std::function<void(const Subscription&, const Notification&)>;

class NotificationDispatcher {
 public:
  NotificationDispatcher() = default;
  ~NotificationDispatcher();
  NotificationDispatcher(const NotificationDispatcher&) = delete;
  NotificationDispatcher& operator=(const NotificationDispatcher&) = delete;

  /// Validates the filter and, for a tenant, that FM is exposed to that PLMN
  /// on the cells of every named slice.
  std::string subscribe(const nrm::Model& model, Subscription s);
  void unsubscribe(const std::string& subscriptionId);
  std::vector<Subscription> subscriptions() const;
  Subscription subscription(const std::string& subscriptionId) const;

  /// Assigns ids in order and queues each notification for every matching
  /// subscription. Returns the number of (notification, subscription) pairs.
  std::size_t dispatch(const nrm::Model& model, std::vector<Notification>& notifications);

  /// Removes and returns queued notifications (pull delivery).
  std::vector<Notification> drain(const std::string& subscriptionId);
  /// As drain, blocking up to `timeout` while the mailbox is empty.
  std::vector<Notification> waitAndDrain(const std::string& subscriptionId, std::chrono::milliseconds timeout);

  /// Starts a worker delivering queued notifications through `handler`.
  /// A notification is retried up to `maxAttempts` times per flush; one that
  /// keeps failing stays at the head of its mailbox.
  void setPushHandler(PushHandler handler, int maxAttempts = 3);
  /// Blocks until the worker has gone through every mailbox once.
  void flush();

  /// Every dispatched notification, in id order.
  std::vector<Notification> log() const;
  std::uint64_t deliveredCount() const;

 private:
  struct Mailbox {
    Subscription subscription;
    std::deque<Notification> queue;
  };

  bool exposedTo(const nrm::Model& model, const Notification& n, const nrm::PlmnId& tenant) const;
  void workerLoop();
  void stopWorker();

  mutable std::mutex mutex_;
  std::condition_variable changed_;
  std::map<std::string, Mailbox> mailboxes_;
  std::vector<Notification> log_;
  std::uint64_t nextNotification_ = 1;
  std::uint64_t nextSubscription_ = 1;
  std::uint64_t delivered_ = 0;

  PushHandler push_;
  int maxAttempts_ = 3;
  std::thread worker_;
  bool stop_ = false;
  std::uint64_t workRequested_ = 0;
  std::uint64_t workDone_ = 0;
};

/// PM store plus notification dispatch, fed once per tick by the simulation
/// loop.
class PmFm {
 public:
  /// Stores the tick's measurements, then forwards its notifications.
  /// OutOfOrderTick leaves both untouched.
  void ingestTickResults(const nrm::Model& model, enforcement::TickResult& result);

  PmStore& store() { return store_; }
  const PmStore& store() const { return store_; }
  NotificationDispatcher& dispatcher() { return dispatcher_; }
  const NotificationDispatcher& dispatcher() const { return dispatcher_; }

 private:
  PmStore store_;
  NotificationDispatcher dispatcher_;
};

}  // namespace ranslice::pmfm
