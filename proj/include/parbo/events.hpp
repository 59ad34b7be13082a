#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "parbo/chooser.hpp"
#include "parbo/config.hpp"

namespace parbo {

enum class EventKind { eval_submitted, eval_completed, inference_submitted, inference_completed };

std::string_view event_kind_name(EventKind k) noexcept;

/// One coordinator transition. Only the fields belonging to `kind` are meaningful.
struct Event {
  EventKind kind = EventKind::eval_submitted;
  double time = 0.0;
  std::uint64_t ticket = 0;

  // eval_submitted
  Eigen::VectorXd u;
  Provenance origin = Provenance::init;
  std::optional<std::uint64_t> source;  // inference ticket that chose u

  // eval_completed
  bool ok = true;
  double y = 0.0;

  // inference_submitted: the (O, P) snapshot by ticket, and the warm start
  std::vector<std::uint64_t> observed;
  std::vector<std::uint64_t> pending;
  std::optional<Hypers> warm;

  // inference_completed
  std::optional<Choice> choice;
  bool discarded = false;

  std::string error;  // failed evaluation or chooser fallback

  bool operator==(const Event& other) const;
};

constexpr int kLogVersion = 1;

struct RunLog {
  RunConfig config;
  std::vector<Event> events;

  bool operator==(const RunLog& other) const;
};

/// Non-finite doubles become the strings "inf", "-inf" and "nan".
nlohmann::json encode_number(double v);
double decode_number(const nlohmann::json& j);

nlohmann::json event_to_json(const Event& e, const ParameterSpace& space);
Event event_from_json(const nlohmann::json& j);
nlohmann::json log_header(const RunConfig& cfg);

/// One header line, then one line per event.
void persist(const RunLog& log, const std::string& path);
void write_log(const RunLog& log, std::ostream& out);
/// Throws LogFormatError with the 1-based line number on a bad record.
RunLog load_log(const std::string& path);
RunLog read_log(std::istream& in);

struct SummaryRow {
  std::size_t index;
  std::uint64_t ticket;
  double time;
  Eigen::VectorXd x;  // raw coordinates
  std::optional<double> y;  // empty for failed evaluations
  Provenance provenance;
  std::optional<double> best_so_far;
};

/// One row per completed evaluation, in completion order.
std::vector<SummaryRow> summarize(const RunLog& log);
void write_summary(const RunLog& log, std::ostream& out);

}  // namespace parbo
