// Copyright 2026 The hetsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "hetsim/simnet.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

namespace hetsim::simnet {

namespace {

constexpr int kScheduler = -1;

// Internal unwind signal for aborted runs; never escapes World::run().
struct AbortSignal {};

std::string group_string(const std::vector<int>& group) {
  std::ostringstream os;
  os << "g[";
  for (size_t i = 0; i < group.size(); ++i) {
    if (i) os << ",";
    os << group[i];
  }
  os << "]";
  return os.str();
}

enum class CollKind { Broadcast, AllGather, AllReduce, Barrier };

const char* coll_kind_name(CollKind k) {
  switch (k) {
    case CollKind::Broadcast: return "broadcast";
    case CollKind::AllGather: return "all_gather";
    case CollKind::AllReduce: return "all_reduce";
    case CollKind::Barrier: return "barrier";
  }
  return "?";
}

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::Send: return "send";
    case EventKind::Recv: return "recv";
    case EventKind::CollectiveEnter: return "coll_enter";
    case EventKind::CollectiveExit: return "coll_exit";
    case EventKind::Note: return "note";
  }
  return "?";
}

struct Message {
  std::string label;
  int mb;
  Direction dir;
  Payload data;
};

struct Collective {
  CollKind kind;
  std::vector<int> group;
  int root = -1;
  std::string label;
  int mb = kNoMicrobatch;
  Direction dir = Direction::None;
  std::map<int, Payload> contrib;
  bool complete = false;
  Payload result;
  int exited = 0;
};

enum class RankStatus { Ready, Blocked, Done };

struct RankState {
  RankStatus status = RankStatus::Ready;
  Script script;
  std::thread thread;
  // Block bookkeeping for wakeups and deadlock reports.
  int wait_src = -1;
  std::shared_ptr<Collective> wait_coll;
  std::string block_reason;
};

}  // namespace

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::None: return "none";
    case Direction::Forward: return "forward";
    case Direction::Backward: return "backward";
  }
  return "?";
}

std::string EventTrace::render() const {
  std::ostringstream os;
  for (const auto& ev : events_) {
    os << ev.seq << " " << ev.rank << " " << event_kind_name(ev.kind) << " "
       << ev.label << " " << (ev.peer.empty() ? "-" : ev.peer) << " ";
    if (ev.mb == kNoMicrobatch)
      os << "-";
    else
      os << ev.mb;
    os << " " << ev.bytes << "\n";
  }
  return os.str();
}

void TrafficLedger::add(const std::string& label, Direction dir,
                        std::int64_t messages, std::int64_t bytes) {
  auto& e = entries_[{label, static_cast<int>(dir)}];
  e.messages += messages;
  e.bytes += bytes;
}

TrafficLedger::Entry TrafficLedger::get(const std::string& label, Direction dir) const {
  auto it = entries_.find({label, static_cast<int>(dir)});
  return it == entries_.end() ? Entry{} : it->second;
}

std::int64_t TrafficLedger::total_messages() const {
  std::int64_t n = 0;
  for (const auto& [k, e] : entries_) n += e.messages;
  return n;
}

std::int64_t TrafficLedger::total_bytes() const {
  std::int64_t n = 0;
  for (const auto& [k, e] : entries_) n += e.bytes;
  return n;
}

std::string TrafficLedger::render() const {
  std::ostringstream os;
  for (const auto& [key, e] : entries_) {
    os << key.first << " " << direction_name(static_cast<Direction>(key.second))
       << " " << e.messages << " " << e.bytes << "\n";
  }
  return os.str();
}

struct World::Impl {
  std::mutex mu;
  std::condition_variable cv;
  int current = kScheduler;
  int world_size = 0;
  bool running = false;
  bool ran = false;
  bool aborted = false;
  std::exception_ptr first_error;
  std::string deadlock_report;

  std::vector<RankState> ranks;
  std::map<std::pair<int, int>, std::deque<Message>> channels;
  std::vector<std::shared_ptr<Collective>> pending;
  TrafficLedger ledger;
  EventTrace trace;
  long seq = 0;

  void log(int rank, EventKind kind, const std::string& label, std::string peer,
           int mb, long bytes) {
    trace.append(TraceEvent{seq++, rank, kind, label, std::move(peer), mb, bytes});
  }

  bool all_done() const {
    for (const auto& r : ranks)
      if (r.status != RankStatus::Done) return false;
    return true;
  }

  // Gives the turn back to the scheduler and waits to be granted it again.
  // Every fabric call passes through here exactly once, which pins the
  // global interleaving to "lowest runnable rank advances".
  void yield_turn(std::unique_lock<std::mutex>& lk, int me) {
    current = kScheduler;
    cv.notify_all();
    cv.wait(lk, [&] { return aborted || current == me; });
    if (aborted) throw AbortSignal{};
  }

  void block(std::unique_lock<std::mutex>& lk, int me, std::string reason) {
    ranks[me].status = RankStatus::Blocked;
    ranks[me].block_reason = std::move(reason);
    yield_turn(lk, me);
    ranks[me].block_reason.clear();
  }

  void wake(int rank) {
    auto& st = ranks[rank];
    if (st.status == RankStatus::Blocked) {
      st.status = RankStatus::Ready;
      st.wait_src = -1;
      st.wait_coll.reset();
    }
  }

  void check_turn(int me) {
    if (aborted) throw AbortSignal{};
    if (current != me)
      raise(ErrorCode::InvalidArgument,
            "fabric call from rank " + std::to_string(me) + " out of turn");
  }

  Payload collective(int me, CollKind kind, const std::vector<int>& group, int root,
                     const std::string& label, int mb, Direction dir, Payload data);
};

Payload World::Impl::collective(int me, CollKind kind, const std::vector<int>& group,
                                int root, const std::string& label, int mb,
                                Direction dir, Payload data) {
  std::unique_lock<std::mutex> lk(mu);
  check_turn(me);
  if (group.empty()) raise(ErrorCode::GroupMismatch, "empty collective group");
  bool member = false;
  for (int g : group) {
    if (g < 0 || g >= world_size)
      raise(ErrorCode::GroupMismatch, "group member out of range");
    if (g == me) member = true;
  }
  if (!member)
    raise(ErrorCode::GroupMismatch,
          "rank " + std::to_string(me) + " not in its own collective group");
  if (kind == CollKind::Broadcast) {
    bool root_in = false;
    for (int g : group) root_in |= (g == root);
    if (!root_in) raise(ErrorCode::GroupMismatch, "broadcast root not in group");
  }

  // Detect disagreeing group declarations: same label and microbatch but a
  // different member list that overlaps this one.
  for (const auto& inst : pending) {
    if (inst->complete || inst->label != label || inst->mb != mb) continue;
    if (inst->group == group) {
      if (inst->kind != kind || (kind == CollKind::Broadcast && inst->root != root))
        raise(ErrorCode::GroupMismatch,
              "collective '" + label + "' redeclared with different kind or root");
      continue;
    }
    bool overlaps = false;
    for (int g : inst->group)
      for (int h : group) overlaps |= (g == h);
    if (overlaps)
      raise(ErrorCode::GroupMismatch,
            "collective '" + label + "' declared with mismatched groups " +
                group_string(inst->group) + " vs " + group_string(group));
  }

  // Join the earliest open instance this rank has not contributed to yet.
  std::shared_ptr<Collective> inst;
  for (const auto& p : pending) {
    if (!p->complete && p->kind == kind && p->label == label && p->mb == mb &&
        p->group == group && !p->contrib.count(me)) {
      inst = p;
      break;
    }
  }
  if (!inst) {
    inst = std::make_shared<Collective>();
    inst->kind = kind;
    inst->group = group;
    inst->root = root;
    inst->label = label;
    inst->mb = mb;
    inst->dir = dir;
    pending.push_back(inst);
  }

  const long in_bytes = static_cast<long>(data.size()) * 8;
  inst->contrib[me] = std::move(data);
  log(me, EventKind::CollectiveEnter, label, group_string(group), mb, in_bytes);

  if (inst->contrib.size() == group.size()) {
    // Last arrival completes the instance; reduction runs in group order.
    const int n = static_cast<int>(group.size());
    switch (kind) {
      case CollKind::Broadcast: {
        inst->result = inst->contrib[inst->root];
        ledger.add(label, dir, n - 1,
                   static_cast<long>(inst->result.size()) * 8 * (n - 1));
        break;
      }
      case CollKind::AllGather: {
        size_t total = 0;
        for (int g : group) total += inst->contrib[g].size();
        inst->result.reserve(total);
        for (int g : group) {
          const Payload& p = inst->contrib[g];
          inst->result.insert(inst->result.end(), p.begin(), p.end());
        }
        ledger.add(label, dir, static_cast<std::int64_t>(n) * (n - 1),
                   static_cast<long>(total) * 8 * (n - 1));
        break;
      }
      case CollKind::AllReduce: {
        const size_t width = inst->contrib[group[0]].size();
        for (int g : group) {
          if (inst->contrib[g].size() != width)
            raise(ErrorCode::ShapeMismatch,
                  "all_reduce '" + label + "' has mixed payload shapes");
        }
        inst->result.assign(width, 0.0);
        for (int g : group) {
          const Payload& p = inst->contrib[g];
          for (size_t i = 0; i < width; ++i) inst->result[i] += p[i];
        }
        ledger.add(label, dir, static_cast<std::int64_t>(n) * (n - 1),
                   static_cast<long>(width) * 8 * n * (n - 1));
        break;
      }
      case CollKind::Barrier:
        break;
    }
    inst->complete = true;
    for (int g : group) {
      if (g != me && ranks[g].wait_coll == inst) wake(g);
    }
  } else {
    ranks[me].wait_coll = inst;
    block(lk, me,
          std::string(coll_kind_name(kind)) + " '" + label + "' group " +
              group_string(group));
  }

  Payload out = inst->result;
  log(me, EventKind::CollectiveExit, label, group_string(group), mb,
      static_cast<long>(out.size()) * 8);
  inst->exited++;
  if (inst->exited == static_cast<int>(group.size())) {
    auto it = std::find(pending.begin(), pending.end(), inst);
    if (it != pending.end()) pending.erase(it);
  }
  yield_turn(lk, me);
  return out;
}

World::World(int num_ranks) : impl_(new Impl), num_ranks_(num_ranks) {
  if (num_ranks < 1) raise(ErrorCode::InvalidArgument, "world needs >= 1 rank");
  impl_->ranks.resize(num_ranks);
  impl_->world_size = num_ranks;
}

World::~World() { delete impl_; }

void World::set_script(int rank, Script script) {
  if (rank < 0 || rank >= num_ranks_)
    raise(ErrorCode::InvalidArgument, "script rank out of range");
  if (impl_->running || impl_->ran)
    raise(ErrorCode::InvalidArgument, "cannot set scripts after run()");
  impl_->ranks[rank].script = std::move(script);
}

void World::run() {
  Impl& im = *impl_;
  if (im.ran) raise(ErrorCode::InvalidArgument, "world already ran");
  im.ran = true;
  im.running = true;

  for (int r = 0; r < num_ranks_; ++r) {
    im.ranks[r].thread = std::thread([this, r] {
      Impl& im = *impl_;
      Rank handle(this, r);
      {
        std::unique_lock<std::mutex> lk(im.mu);
        im.cv.wait(lk, [&] { return im.aborted || im.current == r; });
        if (im.aborted) {
          im.ranks[r].status = RankStatus::Done;
          im.cv.notify_all();
          return;
        }
      }
      try {
        if (im.ranks[r].script) im.ranks[r].script(handle);
      } catch (const AbortSignal&) {
        std::unique_lock<std::mutex> lk(im.mu);
        im.ranks[r].status = RankStatus::Done;
        im.cv.notify_all();
        return;
      } catch (...) {
        std::unique_lock<std::mutex> lk(im.mu);
        if (!im.first_error) im.first_error = std::current_exception();
        im.aborted = true;
      }
      std::unique_lock<std::mutex> lk(im.mu);
      im.ranks[r].status = RankStatus::Done;
      im.current = kScheduler;
      im.cv.notify_all();
    });
  }

  bool deadlocked = false;
  {
    std::unique_lock<std::mutex> lk(im.mu);
    while (true) {
      if (im.aborted || im.all_done()) break;
      int next = -1;
      for (int r = 0; r < num_ranks_; ++r) {
        if (im.ranks[r].status == RankStatus::Ready) {
          next = r;
          break;
        }
      }
      if (next < 0) {
        // Every unfinished rank is blocked: report the wait-set.
        std::ostringstream os;
        os << "no runnable rank; blocked wait-set:";
        for (int r = 0; r < num_ranks_; ++r) {
          if (im.ranks[r].status == RankStatus::Blocked)
            os << " [rank " << r << ": " << im.ranks[r].block_reason << "]";
        }
        im.deadlock_report = os.str();
        im.aborted = true;
        deadlocked = true;
        im.cv.notify_all();
        break;
      }
      im.current = next;
      im.cv.notify_all();
      im.cv.wait(lk, [&] { return im.current == kScheduler; });
    }
    im.cv.notify_all();
    im.cv.wait(lk, [&] { return im.all_done(); });
  }

  for (auto& st : im.ranks)
    if (st.thread.joinable()) st.thread.join();
  im.running = false;

  if (deadlocked) raise(ErrorCode::Deadlock, im.deadlock_report);
  if (im.first_error) std::rethrow_exception(im.first_error);
}

const TrafficLedger& World::ledger() const {
  if (impl_->running)
    raise(ErrorCode::SnapshotWhileActive, "ledger snapshot during active run");
  return impl_->ledger;
}

const EventTrace& World::trace() const {
  if (impl_->running)
    raise(ErrorCode::SnapshotWhileActive, "trace export during active run");
  return impl_->trace;
}

void Rank::send(int dst, const std::string& label, int mb, Direction dir,
                Payload data) {
  World::Impl& im = *world_->impl_;
  std::unique_lock<std::mutex> lk(im.mu);
  im.check_turn(id_);
  if (dst < 0 || dst >= world_->size())
    raise(ErrorCode::InvalidArgument, "send to rank out of range");
  if (dst == id_) raise(ErrorCode::InvalidArgument, "send to self");
  if (im.ranks[dst].status == RankStatus::Done)
    raise(ErrorCode::InvalidArgument,
          "send to finished rank " + std::to_string(dst));
  const long bytes = static_cast<long>(data.size()) * 8;
  im.log(id_, EventKind::Send, label, "r" + std::to_string(dst), mb, bytes);
  im.ledger.add(label, dir, 1, bytes);
  im.channels[{id_, dst}].push_back(Message{label, mb, dir, std::move(data)});
  if (im.ranks[dst].status == RankStatus::Blocked && im.ranks[dst].wait_src == id_)
    im.wake(dst);
  im.yield_turn(lk, id_);
}

Payload Rank::recv(int src, const std::string& label, int mb, Direction dir) {
  World::Impl& im = *world_->impl_;
  std::unique_lock<std::mutex> lk(im.mu);
  im.check_turn(id_);
  if (src < 0 || src >= world_->size())
    raise(ErrorCode::InvalidArgument, "recv from rank out of range");
  auto& chan = im.channels[{src, id_}];
  while (chan.empty()) {
    im.ranks[id_].wait_src = src;
    im.block(lk, id_,
             "recv from rank " + std::to_string(src) + " label '" + label + "'");
  }
  Message msg = std::move(chan.front());
  chan.pop_front();
  if (msg.label != label || msg.mb != mb || msg.dir != dir) {
    raise(ErrorCode::ChannelMismatch,
          "rank " + std::to_string(id_) + " expected (" + label + ", mb " +
              std::to_string(mb) + ") from rank " + std::to_string(src) +
              " but channel head is (" + msg.label + ", mb " +
              std::to_string(msg.mb) + ")");
  }
  const long bytes = static_cast<long>(msg.data.size()) * 8;
  im.log(id_, EventKind::Recv, label, "r" + std::to_string(src), mb, bytes);
  im.yield_turn(lk, id_);
  return std::move(msg.data);
}

Payload Rank::broadcast(const std::vector<int>& group, int root,
                        const std::string& label, int mb, Direction dir,
                        Payload data) {
  return world_->impl_->collective(id_, CollKind::Broadcast, group, root, label, mb,
                                   dir, std::move(data));
}

Payload Rank::all_gather(const std::vector<int>& group, const std::string& label,
                         int mb, Direction dir, Payload data) {
  return world_->impl_->collective(id_, CollKind::AllGather, group, -1, label, mb,
                                   dir, std::move(data));
}

Payload Rank::all_reduce(const std::vector<int>& group, const std::string& label,
                         int mb, Direction dir, Payload data) {
  return world_->impl_->collective(id_, CollKind::AllReduce, group, -1, label, mb,
                                   dir, std::move(data));
}

void Rank::barrier(const std::vector<int>& group, const std::string& label) {
  world_->impl_->collective(id_, CollKind::Barrier, group, -1, label, kNoMicrobatch,
                            Direction::None, Payload{});
}

void Rank::note(const std::string& label, int mb) {
  World::Impl& im = *world_->impl_;
  std::unique_lock<std::mutex> lk(im.mu);
  im.check_turn(id_);
  im.log(id_, EventKind::Note, label, "-", mb, 0);
  im.yield_turn(lk, id_);
}

}  // namespace hetsim::simnet
