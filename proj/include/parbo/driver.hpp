#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "parbo/config.hpp"
#include "parbo/events.hpp"
#include "parbo/executor.hpp"

namespace parbo {

/// Initial design of the run: m points (fewer if the evaluation budget is
/// smaller), pulled edge_tol-and-more inside the cube when edge exclusion is on.
std::vector<Eigen::VectorXd> init_design(const RunConfig& cfg);
std::vector<Eigen::VectorXd> init_design(int m, int dim, std::uint64_t seed);

/// Evaluation failures are tolerated until at least this many have happened
/// and they exceed kMaxFailureFraction of finished evaluations.
constexpr int kMinFailuresToAbort = 4;
constexpr double kMaxFailureFraction = 0.25;

/// Coordinator state as seen by inference jobs.
struct Snapshot {
  std::vector<std::uint64_t> observed_tickets;
  Dataset observed;
  std::vector<std::uint64_t> pending_tickets;
  PendingSet pending;
  std::optional<Hypers> warm;

  explicit Snapshot(int dim) : observed(dim) {}
};

/// One inference job: the configured chooser on the snapshot, falling back to
/// a default step when there are no observations or the chooser throws.
InferenceOutcome choose_next(const RunConfig& cfg, const Snapshot& snap, std::uint64_t seed);

using EventSink = std::function<void(const Event&)>;

/// The asynchronous m-node loop. With the simulated executor the result is a
/// pure function of cfg. Throws RunAborted when evaluations keep failing; the
/// sink has seen every event up to that point.
RunLog run(const RunConfig& cfg, const EventSink& sink = {});
RunLog run(const RunConfig& cfg, Executor& executor, const EventSink& sink = {});

/// Coordinator state after the last event of a log.
Snapshot final_state(const RunLog& log);

/// One chooser call on the final state of a log, under cfg's settings.
/// Returns the choice and its raw coordinates.
std::pair<Choice, Eigen::VectorXd> suggest(const RunLog& log, const RunConfig& cfg);

struct ReplayOptions {
  bool check_variance = true;
  bool check_edges = true;
  bool rerun = false;
};

struct ReplayReport {
  std::vector<std::string> violations;
  std::size_t evals_completed = 0;
  std::size_t evals_failed = 0;
  std::size_t inferences = 0;
  std::size_t discarded = 0;
  std::size_t max_in_flight = 0;
  std::size_t bayes = 0, poll = 0, fallback = 0;
  std::size_t variance_checked = 0;
  std::size_t variance_violations = 0;
  std::size_t edge_violations = 0;
  std::optional<bool> rerun_identical;

  bool ok() const { return violations.empty(); }
};

/// Re-derives the coordinator state from the log and checks the scheduling
/// invariants, variance control of hard-filtered choices and edge avoidance.
ReplayReport replay(const RunLog& log, const ReplayOptions& opts = {});

}  // namespace parbo
