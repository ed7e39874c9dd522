#include "ranslice/pmfm/notifications.hpp"

#include <algorithm>
#include <set>

#include "ranslice/common/json_reader.hpp"
#include "ranslice/nrm/codec.hpp"

namespace ranslice::pmfm {

namespace nt = notification_types;

namespace {

const std::set<std::string>& knownKinds() {
  static const std::set<std::string> kinds{nt::kGuaranteedLoadNotFulfilled, nt::kGuaranteedLoadRestored,
                                           nt::kMaximumLoadExceeded,        nt::kMaximumLoadRestored,
                                           nt::kCellCapacityDegraded,       nt::kCellCapacityRestored,
                                           nt::kLcmOperationCompleted,      nt::kLcmOperationFailed};
  return kinds;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

bool SubscriptionFilter::matches(const Notification& n) const {
  if (!ranSliceIds.empty() && !contains(ranSliceIds, n.ranSliceId)) return false;
  if (!notificationKinds.empty() && !contains(notificationKinds, "*") && !contains(notificationKinds, n.type))
    return false;
  if (tenant && std::find(n.plmns.begin(), n.plmns.end(), *tenant) == n.plmns.end()) return false;
  return true;
}

json Subscription::toJson() const {
  json filter{{"ranSliceIds", this->filter.ranSliceIds}, {"notificationKinds", this->filter.notificationKinds}};
  if (this->filter.tenant) filter["tenant"] = this->filter.tenant->str();
  return {{"subscriptionId", subscriptionId}, {"subscriberId", subscriberId}, {"filter", filter},
          {"endpoint", endpoint}};
}

Subscription parseSubscription(const json& j, const std::string& path) {
  JsonReader r(j, path);
  Subscription s;
  s.subscriberId = r.get<std::string>("subscriberId", "");
  s.endpoint = r.get<std::string>("endpoint", "stream");
  if (const json* f = r.rawOpt("filter")) {
    JsonReader fr(*f, r.pathOf("filter"));
    s.filter.ranSliceIds = fr.get<std::vector<std::string>>("ranSliceIds", {});
    s.filter.notificationKinds = fr.get<std::vector<std::string>>("notificationKinds", {});
    if (const json* t = fr.rawOpt("tenant")) s.filter.tenant = nrm::codec::parsePlmnId(*t, fr.pathOf("tenant"));
    fr.finish();
  }
  r.finish();
  return s;
}

NotificationDispatcher::~NotificationDispatcher() { stopWorker(); }

std::string NotificationDispatcher::subscribe(const nrm::Model& model, Subscription s) {
  const auto& f = s.filter;
  if (f.empty()) throw Error(ErrorCode::InvariantViolation, "subscription filter is empty");
  for (const auto& kind : f.notificationKinds)
    if (kind != "*" && !knownKinds().count(kind))
      throw Error(ErrorCode::InvariantViolation, "unknown notification kind '" + kind + "'", {{"kind", kind}});
  for (const auto& id : f.ranSliceIds) {
    const auto* rs = model.findRanSlice(id);
    if (!rs) throw Error(ErrorCode::UnknownSlice, "RAN slice '" + id + "' not found", {{"ranSliceId", id}});
    if (!f.tenant) continue;
    const bool member = std::any_of(rs->networkIds.begin(), rs->networkIds.end(),
                                     [&](const nrm::NetworkId& n) { return n.plmn == *f.tenant; });
    if (!member)
      throw Error(ErrorCode::ExposureDenied, "PLMN " + f.tenant->str() + " is not served by " + id,
                  {{"ranSliceId", id}, {"tenant", f.tenant->str()}});
    for (const auto& ref : rs->cellSliceRefs) {
      const auto* cell = model.findCell(ref.cellId);
      const auto* info = cell ? cell->findPlmn(*f.tenant) : nullptr;
      if (!info || !info->exposes(nrm::ExposedService::FM))
        throw Error(ErrorCode::ExposureDenied,
                    "FM is not exposed to PLMN " + f.tenant->str() + " on " + ref.cellId,
                    {{"ranSliceId", id}, {"cellId", ref.cellId}, {"tenant", f.tenant->str()}});
    }
  }
  std::lock_guard lock(mutex_);
  s.subscriptionId = "SUB#" + std::to_string(nextSubscription_++);
  const auto id = s.subscriptionId;
  mailboxes_.emplace(id, Mailbox{std::move(s), {}});
  return id;
}

void NotificationDispatcher::unsubscribe(const std::string& subscriptionId) {
  std::lock_guard lock(mutex_);
  if (!mailboxes_.erase(subscriptionId))
    throw Error(ErrorCode::UnknownSubscription, "subscription '" + subscriptionId + "' not found",
                {{"subscriptionId", subscriptionId}});
  changed_.notify_all();
}

std::vector<Subscription> NotificationDispatcher::subscriptions() const {
  std::lock_guard lock(mutex_);
  std::vector<Subscription> out;
  for (const auto& [_, m] : mailboxes_) out.push_back(m.subscription);
  return out;
}

Subscription NotificationDispatcher::subscription(const std::string& subscriptionId) const {
  std::lock_guard lock(mutex_);
  auto it = mailboxes_.find(subscriptionId);
  if (it == mailboxes_.end())
    throw Error(ErrorCode::UnknownSubscription, "subscription '" + subscriptionId + "' not found",
                {{"subscriptionId", subscriptionId}});
  return it->second.subscription;
}

bool NotificationDispatcher::exposedTo(const nrm::Model& model, const Notification& n,
                                       const nrm::PlmnId& tenant) const {
  auto cellExposes = [&](const std::string& cellId) {
    const auto* cell = model.findCell(cellId);
    const auto* info = cell ? cell->findPlmn(tenant) : nullptr;
    return info && info->exposes(nrm::ExposedService::FM);
  };
  if (!n.cellId.empty()) return cellExposes(n.cellId);
  if (const auto* rs = model.findRanSlice(n.ranSliceId))
    return std::any_of(rs->cellSliceRefs.begin(), rs->cellSliceRefs.end(),
                       [&](const nrm::CellSliceRef& r) { return cellExposes(r.cellId); });
  // The slice is gone (termination): the tenant already held the subscription.
  return true;
}

std::size_t NotificationDispatcher::dispatch(const nrm::Model& model, std::vector<Notification>& notifications) {
  std::size_t pairs = 0;
  {
    std::lock_guard lock(mutex_);
    for (auto& n : notifications) {
      n.id = nextNotification_++;
      log_.push_back(n);
      for (auto& [_, m] : mailboxes_) {
        const auto& f = m.subscription.filter;
        if (!f.matches(n)) continue;
        if (f.tenant && !exposedTo(model, n, *f.tenant)) continue;
        m.queue.push_back(n);
        ++pairs;
      }
    }
    if (pairs && push_) ++workRequested_;
  }
  changed_.notify_all();
  return pairs;
}

std::vector<Notification> NotificationDispatcher::drain(const std::string& subscriptionId) {
  return waitAndDrain(subscriptionId, std::chrono::milliseconds(0));
}

std::vector<Notification> NotificationDispatcher::waitAndDrain(const std::string& subscriptionId,
                                                               std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  auto find = [&] {
    auto it = mailboxes_.find(subscriptionId);
    if (it == mailboxes_.end())
      throw Error(ErrorCode::UnknownSubscription, "subscription '" + subscriptionId + "' not found",
                  {{"subscriptionId", subscriptionId}});
    return it;
  };
  find();
  if (timeout.count() > 0)
    changed_.wait_for(lock, timeout, [&] {
      auto it = mailboxes_.find(subscriptionId);
      return it == mailboxes_.end() || !it->second.queue.empty();
    });
  auto it = find();
  std::vector<Notification> out(it->second.queue.begin(), it->second.queue.end());
  it->second.queue.clear();
  delivered_ += out.size();
  return out;
}

void NotificationDispatcher::setPushHandler(PushHandler handler, int maxAttempts) {
  stopWorker();
  std::lock_guard lock(mutex_);
  push_ = std::move(handler);
  maxAttempts_ = std::max(1, maxAttempts);
  if (!push_) return;
  stop_ = false;
  ++workRequested_;
  worker_ = std::thread([this] { workerLoop(); });
}

void NotificationDispatcher::stopWorker() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  changed_.notify_all();
  if (worker_.joinable()) worker_.join();
}

void NotificationDispatcher::flush() {
  std::unique_lock lock(mutex_);
  if (!push_) return;
  const auto target = ++workRequested_;
  changed_.notify_all();
  changed_.wait(lock, [&] { return workDone_ >= target || stop_; });
}

void NotificationDispatcher::workerLoop() {
  std::unique_lock lock(mutex_);
  while (true) {
    changed_.wait(lock, [&] { return stop_ || workDone_ < workRequested_; });
    if (stop_) return;
    const auto pass = workRequested_;
    std::vector<std::string> ids;
    for (const auto& [id, _] : mailboxes_) ids.push_back(id);
    for (const auto& id : ids) {
      while (true) {
        auto it = mailboxes_.find(id);
        if (it == mailboxes_.end() || it->second.queue.empty() || stop_) break;
        const Subscription sub = it->second.subscription;
        const Notification head = it->second.queue.front();
        bool ok = false;
        lock.unlock();
        for (int attempt = 0; attempt < maxAttempts_ && !ok; ++attempt) {
          try {
            push_(sub, head);
            ok = true;
          } catch (...) {
          }
        }
        lock.lock();
        if (!ok) break;
        it = mailboxes_.find(id);
        if (it != mailboxes_.end() && !it->second.queue.empty() && it->second.queue.front().id == head.id) {
          it->second.queue.pop_front();
          ++delivered_;
        }
      }
    }
    workDone_ = pass;
    changed_.notify_all();
  }
}

std::vector<Notification> NotificationDispatcher::log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::uint64_t NotificationDispatcher::deliveredCount() const {
  std::lock_guard lock(mutex_);
  return delivered_;
}

void PmFm::ingestTickResults(const nrm::Model& model, enforcement::TickResult& result) {
  store_.ingest(model, result);
  dispatcher_.dispatch(model, result.notifications);
}

}  // namespace ranslice::pmfm
