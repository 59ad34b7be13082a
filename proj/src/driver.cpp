#include "parbo/driver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "parbo/design.hpp"
#include "parbo/errors.hpp"
#include "parbo/random.hpp"

namespace parbo {

namespace {

// Stream indices under the run seed; tickets use the low range.
constexpr std::uint64_t kDesignStream = 0xd5a61u;

double design_margin(const ChooserConfig& c) { return c.exclude_edge_points ? 2.0 * c.effective_edge_tol() : 0.0; }

}  // namespace

std::vector<Eigen::VectorXd> init_design(int m, int dim, std::uint64_t seed) {
  return sobol_design(m, dim, derive_seed(seed, kDesignStream));
}

std::vector<Eigen::VectorXd> init_design(const RunConfig& cfg) {
  const int dim = cfg.space().dim();
  const int n = cfg.max_evals ? std::min(cfg.m, *cfg.max_evals) : cfg.m;
  const double margin = design_margin(cfg.chooser);
  const std::uint64_t seed = derive_seed(cfg.seed, kDesignStream);
  if (cfg.init.design == InitConfig::Design::sobol) return sobol_design(n, dim, seed, margin);
  Eigen::VectorXd center = Eigen::VectorXd::Constant(dim, 0.5);
  if (!cfg.init.center.empty())
    center = Eigen::Map<const Eigen::VectorXd>(cfg.init.center.data(), dim);
  return clustered_design(n, center, cfg.init.radius, seed, margin);
}

InferenceOutcome choose_next(const RunConfig& cfg, const Snapshot& snap, std::uint64_t seed) {
  auto fallback = [&](std::string error) {
    Rng rng(seed);
    InferenceOutcome out;
    out.choice.x = default_step(snap.observed.dim(), cfg.chooser, rng);
    out.choice.provenance = Provenance::random;
    out.error = std::move(error);
    return out;
  };
  if (cfg.algorithm == Algorithm::random || snap.observed.empty()) return fallback({});
  try {
    if (cfg.algorithm == Algorithm::bop)
      return {bop_choose(snap.observed, snap.pending, cfg.chooser, snap.warm, seed), {}};
    return {fubar_choose(snap.observed, snap.pending, cfg.chooser, snap.warm, seed), {}};
  } catch (const std::exception& e) {
    return fallback(std::string("chooser failed: ") + e.what());
  }
}

namespace {

std::unique_ptr<Executor> make_executor(const RunConfig& cfg) {
  if (cfg.executor == RunConfig::ExecutorKind::subprocess)
    return std::make_unique<SubprocessExecutor>(cfg.subprocess.command);
  return std::make_unique<SimulatedExecutor>(builtin_evaluator(*cfg.objective, cfg.simulated.failure_prob, cfg.seed),
                                             lognormal_durations(cfg.simulated, cfg.seed));
}

class Coordinator {
 public:
  Coordinator(const RunConfig& cfg, Executor& ex, const EventSink& sink)
      : cfg_(cfg), space_(cfg.space()), ex_(ex), sink_(sink), state_(space_.dim()) {
    log_.config = cfg;
  }

  RunLog run() {
    for (const auto& u : init_design(cfg_)) submit_eval(u, Provenance::init, std::nullopt);
    while (ex_.in_flight() > 0) {
      Completion c = ex_.wait();
      if (c.kind == Completion::Kind::eval)
        on_eval(c);
      else
        on_inference(c);
    }
    return std::move(log_);
  }

 private:
  bool out_of_time() const { return cfg_.max_time && ex_.now() >= *cfg_.max_time; }

  bool may_start_inference() const {
    if (out_of_time()) return false;
    return !cfg_.max_evals || evals_submitted_ + inferences_running_ < static_cast<std::size_t>(*cfg_.max_evals);
  }

  void emit(Event e) {
    if (sink_) sink_(e);
    log_.events.push_back(std::move(e));
  }

  void submit_eval(const Eigen::VectorXd& u, Provenance origin, std::optional<std::uint64_t> source) {
    const std::uint64_t ticket = next_ticket_++;
    Event e;
    e.kind = EventKind::eval_submitted;
    e.time = ex_.now();
    e.ticket = ticket;
    e.u = u;
    e.origin = origin;
    e.source = source;
    emit(std::move(e));
    state_.pending.add(ticket, u);
    state_.pending_tickets.push_back(ticket);
    ++evals_submitted_;
    ex_.submit_eval(ticket, space_.from_unit(u));
  }

  void on_eval(const Completion& c) {
    Event e;
    e.kind = EventKind::eval_completed;
    e.time = c.time;
    e.ticket = c.ticket;
    e.ok = c.eval.ok;
    e.y = c.eval.ok ? c.eval.y : 0.0;
    e.error = c.eval.error;
    emit(std::move(e));

    const auto it = std::find_if(state_.pending.entries.begin(), state_.pending.entries.end(),
                                 [&](const PendingSet::Entry& p) { return p.ticket == c.ticket; });
    if (it == state_.pending.entries.end()) throw std::logic_error("completion of a ticket that is not pending");
    const Eigen::VectorXd u = it->u;
    state_.pending.entries.erase(it);
    std::erase(state_.pending_tickets, c.ticket);
    ++evals_finished_;
    if (c.eval.ok) {
      state_.observed.append(u, c.eval.y);
      state_.observed_tickets.push_back(c.ticket);
    } else {
      ++evals_failed_;
      if (evals_failed_ >= static_cast<std::size_t>(kMinFailuresToAbort) &&
          static_cast<double>(evals_failed_) > kMaxFailureFraction * static_cast<double>(evals_finished_)) {
        std::ostringstream msg;
        msg << evals_failed_ << " of " << evals_finished_ << " evaluations failed; last error: " << c.eval.error;
        throw RunAborted(msg.str());
      }
    }
    if (may_start_inference()) submit_inference();
  }

  void submit_inference() {
    const std::uint64_t ticket = next_ticket_++;
    Event e;
    e.kind = EventKind::inference_submitted;
    e.time = ex_.now();
    e.ticket = ticket;
    e.observed = state_.observed_tickets;
    e.pending = state_.pending_tickets;
    e.warm = state_.warm;
    emit(std::move(e));
    ++inferences_running_;
    ex_.submit_inference(ticket, [cfg = cfg_, snap = state_, seed = derive_seed(cfg_.seed, ticket)] {
      return choose_next(cfg, snap, seed);
    });
  }

  void on_inference(Completion& c) {
    --inferences_running_;
    Event e;
    e.kind = EventKind::inference_completed;
    e.time = c.time;
    e.ticket = c.ticket;
    const bool keep = !out_of_time() &&
                      (!cfg_.max_evals || evals_submitted_ < static_cast<std::size_t>(*cfg_.max_evals));
    e.discarded = !keep;
    e.choice = c.inference.choice;
    e.error = c.inference.error;
    emit(std::move(e));
    if (!keep) return;
    if (c.inference.choice.diagnostics.hypers) state_.warm = c.inference.choice.diagnostics.hypers;
    submit_eval(c.inference.choice.x, c.inference.choice.provenance, c.ticket);
  }

  const RunConfig& cfg_;
  ParameterSpace space_;
  Executor& ex_;
  const EventSink& sink_;
  RunLog log_;
  Snapshot state_;
  std::uint64_t next_ticket_ = 0;
  std::size_t evals_submitted_ = 0, evals_finished_ = 0, evals_failed_ = 0;
  std::size_t inferences_running_ = 0;
};

}  // namespace

RunLog run(const RunConfig& cfg, Executor& executor, const EventSink& sink) {
  cfg.validate();
  return Coordinator(cfg, executor, sink).run();
}

RunLog run(const RunConfig& cfg, const EventSink& sink) {
  cfg.validate();
  auto ex = make_executor(cfg);
  return Coordinator(cfg, *ex, sink).run();
}

Snapshot final_state(const RunLog& log) {
  Snapshot s(log.config.space().dim());
  std::unordered_map<std::uint64_t, Eigen::VectorXd> where;
  for (const auto& e : log.events) {
    switch (e.kind) {
      case EventKind::eval_submitted:
        where[e.ticket] = e.u;
        s.pending.add(e.ticket, e.u);
        s.pending_tickets.push_back(e.ticket);
        break;
      case EventKind::eval_completed: {
        std::erase_if(s.pending.entries, [&](const PendingSet::Entry& p) { return p.ticket == e.ticket; });
        std::erase(s.pending_tickets, e.ticket);
        if (e.ok) {
          s.observed.append(where.at(e.ticket), e.y);
          s.observed_tickets.push_back(e.ticket);
        }
        break;
      }
      case EventKind::inference_completed:
        if (!e.discarded && e.choice && e.choice->diagnostics.hypers) s.warm = e.choice->diagnostics.hypers;
        break;
      case EventKind::inference_submitted:
        break;
    }
  }
  return s;
}

std::pair<Choice, Eigen::VectorXd> suggest(const RunLog& log, const RunConfig& cfg) {
  const auto space = cfg.space();
  Snapshot snap = final_state(log);
  if (snap.observed.dim() != space.dim()) throw ConfigError("state log and config disagree on the dimension");
  std::uint64_t next = 0;
  for (const auto& e : log.events) next = std::max(next, e.ticket + 1);
  auto out = choose_next(cfg, snap, derive_seed(cfg.seed, next));
  return {out.choice, space.from_unit(out.choice.x)};
}

ReplayReport replay(const RunLog& log, const ReplayOptions& opts) {
  ReplayReport rep;
  const RunConfig& cfg = log.config;
  const int dim = cfg.space().dim();
  auto fail = [&](std::size_t i, const std::string& what) {
    rep.violations.push_back("event " + std::to_string(i) + ": " + what);
  };

  enum class Stage { submitted, completed };
  struct TicketState {
    bool eval;
    Stage stage;
    std::size_t submitted_at;
  };
  std::map<std::uint64_t, TicketState> tickets;
  std::unordered_map<std::uint64_t, Eigen::VectorXd> where;
  std::unordered_map<std::uint64_t, Event> inference_input;
  std::vector<std::uint64_t> observed, pending;
  std::optional<Hypers> warm;
  std::size_t in_flight = 0, evals_submitted = 0;
  double last_time = -std::numeric_limits<double>::infinity();
  const Event* last_inference = nullptr;
  const double edge_tol = cfg.chooser.effective_edge_tol();

  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const Event& e = log.events[i];
    if (e.time < last_time) fail(i, "time goes backwards");
    last_time = e.time;
    const bool submit = e.kind == EventKind::eval_submitted || e.kind == EventKind::inference_submitted;
    const bool eval = e.kind == EventKind::eval_submitted || e.kind == EventKind::eval_completed;
    if (submit) {
      if (tickets.count(e.ticket)) {
        fail(i, "ticket " + std::to_string(e.ticket) + " submitted twice");
        continue;
      }
      tickets[e.ticket] = {eval, Stage::submitted, i};
      rep.max_in_flight = std::max(rep.max_in_flight, ++in_flight);
      if (in_flight > static_cast<std::size_t>(cfg.m)) fail(i, "more than m jobs in flight");
    } else {
      auto it = tickets.find(e.ticket);
      if (it == tickets.end() || it->second.stage != Stage::submitted || it->second.eval != eval) {
        fail(i, "ticket " + std::to_string(e.ticket) + " completed without a matching submission");
        continue;
      }
      it->second.stage = Stage::completed;
      --in_flight;
    }

    switch (e.kind) {
      case EventKind::eval_submitted: {
        ++evals_submitted;
        if (e.u.size() != dim) fail(i, "point has the wrong dimension");
        if ((e.u.array() < 0.0).any() || (e.u.array() > 1.0).any()) fail(i, "point outside the unit cube");
        if (opts.check_edges && cfg.chooser.exclude_edge_points && is_edge_point(e.u, edge_tol)) {
          ++rep.edge_violations;
          fail(i, "edge point submitted");
        }
        if (e.origin == Provenance::init) {
          if (e.source) fail(i, "initial point with a source");
        } else if (!e.source || last_inference != &log.events[i - 1] || last_inference->ticket != *e.source ||
                   !last_inference->choice || last_inference->choice->x != e.u) {
          fail(i, "evaluation does not follow its inference");
        }
        where[e.ticket] = e.u;
        pending.push_back(e.ticket);
        break;
      }
      case EventKind::eval_completed:
        std::erase(pending, e.ticket);
        ++rep.evals_completed;
        if (e.ok)
          observed.push_back(e.ticket);
        else
          ++rep.evals_failed;
        break;
      case EventKind::inference_submitted:
        if (e.observed != observed) fail(i, "inference snapshot disagrees with the observations");
        if (e.pending != pending) fail(i, "inference snapshot disagrees with the pending set");
        if (e.warm != warm) fail(i, "inference warm start is not the latest sampled hypers");
        inference_input.emplace(e.ticket, e);
        break;
      case EventKind::inference_completed: {
        ++rep.inferences;
        last_inference = &e;
        if (e.discarded) {
          ++rep.discarded;
          break;
        }
        if (!e.choice) {
          fail(i, "inference completed without a choice");
          break;
        }
        const Choice& ch = *e.choice;
        switch (ch.provenance) {
          case Provenance::bayes: ++rep.bayes; break;
          case Provenance::poll: ++rep.poll; break;
          default: ++rep.fallback; break;
        }
        if (ch.diagnostics.hypers) warm = ch.diagnostics.hypers;
        const bool hard_filtered = ch.provenance == Provenance::poll ||
                                   (ch.provenance == Provenance::bayes && cfg.algorithm == Algorithm::bop);
        if (opts.check_variance && hard_filtered && ch.diagnostics.hypers) {
          const Event& in = inference_input.at(e.ticket);
          const Hypers& h = *ch.diagnostics.hypers;
          Dataset locs(dim);
          for (auto t : in.observed) locs.append(where.at(t), 0.0);
          for (auto t : in.pending) locs.append(where.at(t), 0.0);
          const double sd = std::sqrt(fit(locs, h).predict(ch.x).var);
          const double tau = variance_threshold(cfg.chooser, h);
          ++rep.variance_checked;
          if (!(sd > tau)) {
            ++rep.variance_violations;
            fail(i, "chosen point has sd " + std::to_string(sd) + " <= tau " + std::to_string(tau));
          }
          if (std::abs(sd - ch.diagnostics.sd) > 1e-9 * std::max(1.0, sd))
            fail(i, "recorded sd does not match the snapshot");
        }
        break;
      }
    }
  }
  for (const auto& [t, s] : tickets)
    if (s.stage != Stage::completed) rep.violations.push_back("ticket " + std::to_string(t) + " never completed");
  if (cfg.max_evals && evals_submitted > static_cast<std::size_t>(*cfg.max_evals))
    rep.violations.push_back("more evaluations than the budget");

  std::optional<double> best;
  for (const auto& r : summarize(log)) {
    if (best && (!r.best_so_far || *r.best_so_far < *best)) rep.violations.push_back("best-so-far decreased");
    best = r.best_so_far;
  }

  if (opts.rerun) {
    if (cfg.executor == RunConfig::ExecutorKind::simulated) {
      rep.rerun_identical = run(cfg) == log;
      if (!*rep.rerun_identical) rep.violations.push_back("re-run does not reproduce the log");
    }
  }
  return rep;
}

}  // namespace parbo
