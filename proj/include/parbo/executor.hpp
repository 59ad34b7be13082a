#pragma once

#include <Eigen/Core>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <queue>
#include <string>
#include <thread>
#include <vector>

#include "parbo/chooser.hpp"
#include "parbo/config.hpp"

namespace parbo {

struct EvalOutcome {
  bool ok = true;
  double y = 0.0;
  std::string error;
};

struct InferenceOutcome {
  Choice choice;
  std::string error;  // set when the chooser failed and a fallback was used
};

using InferenceWork = std::function<InferenceOutcome()>;

struct Completion {
  enum class Kind { eval, inference } kind;
  std::uint64_t ticket;
  double time;
  EvalOutcome eval;
  InferenceOutcome inference;
};

/// Runs evaluation and inference jobs and reports completions one at a time.
/// Used from a single coordinator thread.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual double now() const = 0;
  virtual void submit_eval(std::uint64_t ticket, const Eigen::VectorXd& x_raw) = 0;
  virtual void submit_inference(std::uint64_t ticket, InferenceWork work) = 0;
  /// Blocks until the next job finishes. Precondition: in_flight() > 0.
  virtual Completion wait() = 0;
  virtual std::size_t in_flight() const = 0;
};

using Evaluator = std::function<EvalOutcome(std::uint64_t ticket, const Eigen::VectorXd& x_raw)>;
using DurationLaw = std::function<double(Completion::Kind kind, std::uint64_t ticket)>;

/// Discrete-event execution on a virtual clock. Jobs finish in order of
/// submission time plus drawn duration; ties go to the earlier submission.
class SimulatedExecutor final : public Executor {
 public:
  SimulatedExecutor(Evaluator evaluator, DurationLaw durations);

  double now() const override { return clock_; }
  void submit_eval(std::uint64_t ticket, const Eigen::VectorXd& x_raw) override;
  void submit_inference(std::uint64_t ticket, InferenceWork work) override;
  Completion wait() override;
  std::size_t in_flight() const override { return queue_.size(); }

 private:
  struct Job {
    double finish;
    std::uint64_t seq;
    Completion::Kind kind;
    std::uint64_t ticket;
    Eigen::VectorXd x_raw;
    InferenceWork work;
  };
  struct Later {
    bool operator()(const Job& a, const Job& b) const {
      return a.finish != b.finish ? a.finish > b.finish : a.seq > b.seq;
    }
  };

  Evaluator evaluator_;
  DurationLaw durations_;
  double clock_ = 0.0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Job, std::vector<Job>, Later> queue_;
};

/// Log-normal durations with per-ticket random streams, so a job's duration
/// does not depend on the order in which jobs are submitted.
DurationLaw lognormal_durations(const SimulatedExecutorConfig& cfg, std::uint64_t seed);

/// Built-in objective with additive Gaussian noise and optional injected failures.
Evaluator builtin_evaluator(const ObjectiveConfig& obj, double failure_prob, std::uint64_t seed);

/// Wall-clock execution on threads. Evaluations run an external command that
/// reads {"x": [...]} on stdin and prints {"y": value} or a bare number.
class SubprocessExecutor final : public Executor {
 public:
  explicit SubprocessExecutor(std::vector<std::string> command);
  ~SubprocessExecutor() override;

  double now() const override;
  void submit_eval(std::uint64_t ticket, const Eigen::VectorXd& x_raw) override;
  void submit_inference(std::uint64_t ticket, InferenceWork work) override;
  Completion wait() override;
  std::size_t in_flight() const override;

 private:
  void finish(Completion c);

  std::vector<std::string> command_;
  std::chrono::steady_clock::time_point start_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Completion> done_;
  std::size_t running_ = 0;
  std::vector<std::thread> threads_;
};

/// Runs command once with x on stdin and parses its output.
EvalOutcome run_command(const std::vector<std::string>& command, const Eigen::VectorXd& x_raw);

}  // namespace parbo
