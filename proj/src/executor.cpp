#include "parbo/executor.hpp"

#include <cerrno>
#include <cmath>
#include <cstring>
#include <fcntl.h>
#include <json.hpp>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include "parbo/errors.hpp"
#include "parbo/objectives.hpp"
#include "parbo/random.hpp"

namespace parbo {

SimulatedExecutor::SimulatedExecutor(Evaluator evaluator, DurationLaw durations)
    : evaluator_(std::move(evaluator)), durations_(std::move(durations)) {}

void SimulatedExecutor::submit_eval(std::uint64_t ticket, const Eigen::VectorXd& x_raw) {
  const double d = durations_(Completion::Kind::eval, ticket);
  if (!(d > 0.0)) throw DomainError("job durations must be positive");
  queue_.push(Job{clock_ + d, seq_++, Completion::Kind::eval, ticket, x_raw, {}});
}

void SimulatedExecutor::submit_inference(std::uint64_t ticket, InferenceWork work) {
  const double d = durations_(Completion::Kind::inference, ticket);
  if (!(d > 0.0)) throw DomainError("job durations must be positive");
  queue_.push(Job{clock_ + d, seq_++, Completion::Kind::inference, ticket, {}, std::move(work)});
}

Completion SimulatedExecutor::wait() {
  if (queue_.empty()) throw std::logic_error("wait() with nothing in flight");
  Job job = queue_.top();
  queue_.pop();
  clock_ = job.finish;
  Completion c{job.kind, job.ticket, clock_, {}, {}};
  if (job.kind == Completion::Kind::eval)
    c.eval = evaluator_(job.ticket, job.x_raw);
  else
    c.inference = job.work();
  return c;
}

DurationLaw lognormal_durations(const SimulatedExecutorConfig& cfg, std::uint64_t seed) {
  return [cfg, seed](Completion::Kind kind, std::uint64_t ticket) {
    Rng rng(derive_seed(derive_seed(seed, ticket), 1));
    const bool eval = kind == Completion::Kind::eval;
    const double median = eval ? cfg.eval_median : cfg.inference_median;
    const double s = eval ? cfg.eval_sigma_log : cfg.inference_sigma_log;
    return median * std::exp(s * standard_normal(rng));
  };
}

Evaluator builtin_evaluator(const ObjectiveConfig& obj, double failure_prob, std::uint64_t seed) {
  const Objective o = make_objective(obj.id, obj.dim);
  const double noise = obj.noise_sd;
  return [o, noise, failure_prob, seed](std::uint64_t ticket, const Eigen::VectorXd& x) {
    Rng rng(derive_seed(derive_seed(seed, ticket), 2));
    if (failure_prob > 0.0 && uniform01(rng) < failure_prob) return EvalOutcome{false, 0.0, "injected failure"};
    double y = o.f(x);
    if (noise > 0.0) y += noise * standard_normal(rng);
    return EvalOutcome{true, y, {}};
  };
}

// ---- subprocess

namespace {

bool write_all(int fd, const std::string& s) {
  std::size_t off = 0;
  while (off < s.size()) {
    const ssize_t n = ::write(fd, s.data() + off, s.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

EvalOutcome run_command(const std::vector<std::string>& command, const Eigen::VectorXd& x_raw) {
  if (command.empty()) return {false, 0.0, "empty command"};
  int in_pipe[2], out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) return {false, 0.0, std::string("pipe: ") + std::strerror(errno)};
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    return {false, 0.0, std::string("pipe: ") + std::strerror(errno)};
  }
  std::vector<char*> argv;
  for (const auto& a : command) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);

  const pid_t pid = ::fork();
  if (pid < 0) return {false, 0.0, std::string("fork: ") + std::strerror(errno)};
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execvp(argv[0], argv.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);

  nlohmann::json req = {{"x", std::vector<double>(x_raw.data(), x_raw.data() + x_raw.size())}};
  // a child that exits without reading stdin must not kill us with SIGPIPE
  ::signal(SIGPIPE, SIG_IGN);
  write_all(in_pipe[1], req.dump() + "\n");
  ::close(in_pipe[1]);

  std::string output;
  char buf[4096];
  for (;;) {
    const ssize_t n = ::read(out_pipe[0], buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    output.append(buf, static_cast<std::size_t>(n));
  }
  ::close(out_pipe[0]);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    return {false, 0.0, "command exited with status " + std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1)};

  try {
    const auto first = output.find_first_not_of(" \t\r\n");
    const auto nl = output.find('\n', first == std::string::npos ? 0 : first);
    const auto line = first == std::string::npos ? std::string() : output.substr(first, nl - first);
    const auto j = nlohmann::json::parse(line);
    double y;
    if (j.is_number())
      y = j.get<double>();
    else
      y = j.at("y").get<double>();
    if (!std::isfinite(y)) return {false, 0.0, "non-finite objective value"};
    return {true, y, {}};
  } catch (const std::exception& e) {
    return {false, 0.0, std::string("bad objective output: ") + e.what()};
  }
}

SubprocessExecutor::SubprocessExecutor(std::vector<std::string> command)
    : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

SubprocessExecutor::~SubprocessExecutor() {
  for (auto& t : threads_)
    if (t.joinable()) t.join();
}

double SubprocessExecutor::now() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

std::size_t SubprocessExecutor::in_flight() const {
  std::lock_guard lock(mu_);
  return running_ + done_.size();
}

void SubprocessExecutor::finish(Completion c) {
  {
    std::lock_guard lock(mu_);
    --running_;
    done_.push_back(std::move(c));
  }
  cv_.notify_one();
}

void SubprocessExecutor::submit_eval(std::uint64_t ticket, const Eigen::VectorXd& x_raw) {
  {
    std::lock_guard lock(mu_);
    ++running_;
  }
  threads_.emplace_back([this, ticket, x = Eigen::VectorXd(x_raw)] {
    finish(Completion{Completion::Kind::eval, ticket, 0.0, run_command(command_, x), {}});
  });
}

void SubprocessExecutor::submit_inference(std::uint64_t ticket, InferenceWork work) {
  {
    std::lock_guard lock(mu_);
    ++running_;
  }
  threads_.emplace_back([this, ticket, work = std::move(work)] {
    Completion c{Completion::Kind::inference, ticket, 0.0, {}, {}};
    c.inference = work();
    finish(std::move(c));
  });
}

Completion SubprocessExecutor::wait() {
  std::unique_lock lock(mu_);
  if (running_ == 0 && done_.empty()) throw std::logic_error("wait() with nothing in flight");
  cv_.wait(lock, [this] { return !done_.empty(); });
  Completion c = std::move(done_.front());
  done_.pop_front();
  // stamped when the coordinator sees it, so log times never run backwards
  c.time = now();
  return c;
}

}  // namespace parbo
