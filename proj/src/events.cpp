#include "parbo/events.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "parbo/errors.hpp"

namespace parbo {

using nlohmann::json;

std::string_view event_kind_name(EventKind k) noexcept {
  switch (k) {
    case EventKind::eval_submitted: return "eval_submitted";
    case EventKind::eval_completed: return "eval_completed";
    case EventKind::inference_submitted: return "inference_submitted";
    case EventKind::inference_completed: return "inference_completed";
  }
  return "?";
}

namespace {

EventKind event_kind_from_name(const std::string& s) {
  for (auto k : {EventKind::eval_submitted, EventKind::eval_completed, EventKind::inference_submitted,
                 EventKind::inference_completed})
    if (event_kind_name(k) == s) return k;
  throw DomainError("unknown event kind '" + s + "'");
}

bool same_vector(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.size() == b.size() && a == b; }

json encode_vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(encode_number(v[i]));
  return out;
}

Eigen::VectorXd decode_vector(const json& j) {
  if (!j.is_array()) throw DomainError("expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = decode_number(j[i]);
  return v;
}

json encode_hypers(const Hypers& h) {
  return {{"sigma", encode_number(h.sigma)},
          {"mu_bar", encode_number(h.mu_bar)},
          {"amp", encode_number(h.amp)},
          {"lengths", encode_vector(h.lengths)}};
}

Hypers decode_hypers(const json& j) {
  Hypers h;
  h.sigma = decode_number(j.at("sigma"));
  h.mu_bar = decode_number(j.at("mu_bar"));
  h.amp = decode_number(j.at("amp"));
  h.lengths = decode_vector(j.at("lengths"));
  return h;
}

json encode_choice(const Choice& c) {
  const auto& d = c.diagnostics;
  const auto& n = d.counts;
  return {{"u", encode_vector(c.x)},
          {"provenance", provenance_name(c.provenance)},
          {"hypers", d.hypers ? encode_hypers(*d.hypers) : json(nullptr)},
          {"y_offset", encode_number(d.y_offset)},
          {"y_scale", encode_number(d.y_scale)},
          {"tau", encode_number(d.tau)},
          {"sd", encode_number(d.sd)},
          {"improvement", encode_number(d.improvement)},
          {"incumbent", encode_number(d.incumbent)},
          {"counts",
           {{"generated", n.generated},
            {"after_collision", n.after_collision},
            {"after_sd", n.after_sd},
            {"after_edge", n.after_edge},
            {"after_improvement", n.after_improvement},
            {"poll_generated", n.poll_generated},
            {"poll_after_sd", n.poll_after_sd},
            {"poll_after_edge", n.poll_after_edge}}}};
}

Choice decode_choice(const json& j) {
  Choice c;
  c.x = decode_vector(j.at("u"));
  c.provenance = provenance_from_name(j.at("provenance").get<std::string>());
  auto& d = c.diagnostics;
  if (!j.at("hypers").is_null()) d.hypers = decode_hypers(j.at("hypers"));
  d.y_offset = decode_number(j.at("y_offset"));
  d.y_scale = decode_number(j.at("y_scale"));
  d.tau = decode_number(j.at("tau"));
  d.sd = decode_number(j.at("sd"));
  d.improvement = decode_number(j.at("improvement"));
  d.incumbent = decode_number(j.at("incumbent"));
  const auto& n = j.at("counts");
  d.counts.generated = n.at("generated").get<int>();
  d.counts.after_collision = n.at("after_collision").get<int>();
  d.counts.after_sd = n.at("after_sd").get<int>();
  d.counts.after_edge = n.at("after_edge").get<int>();
  d.counts.after_improvement = n.at("after_improvement").get<int>();
  d.counts.poll_generated = n.at("poll_generated").get<int>();
  d.counts.poll_after_sd = n.at("poll_after_sd").get<int>();
  d.counts.poll_after_edge = n.at("poll_after_edge").get<int>();
  return c;
}

}  // namespace

bool Event::operator==(const Event& o) const {
  return kind == o.kind && time == o.time && ticket == o.ticket && same_vector(u, o.u) && origin == o.origin &&
         source == o.source && ok == o.ok && y == o.y && observed == o.observed && pending == o.pending &&
         warm == o.warm && choice == o.choice && discarded == o.discarded && error == o.error;
}

bool RunLog::operator==(const RunLog& o) const {
  return to_json(config) == to_json(o.config) && events == o.events;
}

json encode_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double decode_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw DomainError("expected a number");
}

json event_to_json(const Event& e, const ParameterSpace& space) {
  json j = {{"kind", event_kind_name(e.kind)}, {"t", encode_number(e.time)}, {"ticket", e.ticket}};
  switch (e.kind) {
    case EventKind::eval_submitted:
      j["u"] = encode_vector(e.u);
      j["x"] = encode_vector(space.from_unit(e.u));
      j["origin"] = provenance_name(e.origin);
      if (e.source) j["source"] = *e.source;
      break;
    case EventKind::eval_completed:
      j["ok"] = e.ok;
      if (e.ok) j["y"] = encode_number(e.y);
      break;
    case EventKind::inference_submitted:
      j["observed"] = e.observed;
      j["pending"] = e.pending;
      j["warm"] = e.warm ? encode_hypers(*e.warm) : json(nullptr);
      break;
    case EventKind::inference_completed:
      j["discarded"] = e.discarded;
      j["choice"] = e.choice ? encode_choice(*e.choice) : json(nullptr);
      break;
  }
  if (!e.error.empty()) j["error"] = e.error;
  return j;
}

Event event_from_json(const json& j) {
  Event e;
  e.kind = event_kind_from_name(j.at("kind").get<std::string>());
  e.time = decode_number(j.at("t"));
  e.ticket = j.at("ticket").get<std::uint64_t>();
  switch (e.kind) {
    case EventKind::eval_submitted:
      e.u = decode_vector(j.at("u"));
      e.origin = provenance_from_name(j.at("origin").get<std::string>());
      if (j.contains("source")) e.source = j.at("source").get<std::uint64_t>();
      break;
    case EventKind::eval_completed:
      e.ok = j.at("ok").get<bool>();
      if (e.ok) e.y = decode_number(j.at("y"));
      break;
    case EventKind::inference_submitted:
      e.observed = j.at("observed").get<std::vector<std::uint64_t>>();
      e.pending = j.at("pending").get<std::vector<std::uint64_t>>();
      if (!j.at("warm").is_null()) e.warm = decode_hypers(j.at("warm"));
      break;
    case EventKind::inference_completed:
      e.discarded = j.at("discarded").get<bool>();
      if (!j.at("choice").is_null()) e.choice = decode_choice(j.at("choice"));
      break;
  }
  if (j.contains("error")) e.error = j.at("error").get<std::string>();
  return e;
}

json log_header(const RunConfig& cfg) { return {{"v", kLogVersion}, {"kind", "header"}, {"config", to_json(cfg)}}; }

void write_log(const RunLog& log, std::ostream& out) {
  const auto space = log.config.space();
  out << log_header(log.config).dump() << '\n';
  for (const auto& e : log.events) out << event_to_json(e, space).dump() << '\n';
}

void persist(const RunLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_log(log, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

RunLog read_log(std::istream& in) {
  RunLog log;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw LogFormatError(std::string("unparsable record: ") + e.what(), lineno);
    }
    try {
      if (!have_header) {
        if (!j.is_object() || j.value("kind", "") != "header") throw LogFormatError("missing header record", lineno);
        if (!j.contains("v") || j.at("v") != kLogVersion)
          throw LogFormatError("unsupported schema version " + j.value("v", json(nullptr)).dump(), lineno);
        log.config = run_config_from_json(j.at("config"));
        have_header = true;
        continue;
      }
      log.events.push_back(event_from_json(j));
    } catch (const LogFormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw LogFormatError(e.what(), lineno);
    }
  }
  if (!have_header) throw LogFormatError("empty log", lineno + 1);
  return log;
}

RunLog load_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_log(in);
}

std::vector<SummaryRow> summarize(const RunLog& log) {
  const auto space = log.config.space();
  std::unordered_map<std::uint64_t, const Event*> submitted;
  std::vector<SummaryRow> rows;
  std::optional<double> best;
  for (const auto& e : log.events) {
    if (e.kind == EventKind::eval_submitted) submitted[e.ticket] = &e;
    if (e.kind != EventKind::eval_completed) continue;
    const auto it = submitted.find(e.ticket);
    if (it == submitted.end()) throw DomainError("completion of unknown ticket " + std::to_string(e.ticket));
    SummaryRow r{rows.size(), e.ticket, e.time, space.from_unit(it->second->u), std::nullopt,
                 it->second->origin, std::nullopt};
    if (e.ok) {
      r.y = e.y;
      if (!best || e.y > *best) best = e.y;
    }
    r.best_so_far = best;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary(const RunLog& log, std::ostream& out) {
  const int dim = log.config.space().dim();
  out << "index,ticket,time";
  for (int k = 0; k < dim; ++k) out << ",x_" << k;
  out << ",y,provenance,best_so_far\n";
  auto num = [](std::optional<double> v) {
    if (!v) return std::string();
    std::ostringstream s;
    s << std::setprecision(17) << *v;
    return s.str();
  };
  for (const auto& r : summarize(log)) {
    out << r.index << ',' << r.ticket << ',' << num(r.time);
    for (int k = 0; k < dim; ++k) out << ',' << num(r.x[k]);
    out << ',' << num(r.y) << ',' << provenance_name(r.provenance) << ',' << num(r.best_so_far) << '\n';
  }
}

}  // namespace parbo
