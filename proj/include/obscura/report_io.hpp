#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "obscura/analytic_engine.hpp"
#include "obscura/attack_simulator.hpp"
#include "obscura/measure_catalog.hpp"
#include "obscura/threat_model.hpp"

// Report serialization. Byte-deterministic on a given build: fixed key and
// column order, floats at 6 significant digits via std::to_chars (locale
// independent), and the same number formatter for JSON and CSV so the two
// renderings of one report carry identical numeric values. Infinities render
// as "infinity" in both formats; absent statistics render as JSON null /
// empty CSV cells.

namespace obscura {

enum class ReportFormat { Json, Csv };

inline std::optional<ReportFormat> report_format_from_string(
    std::string_view s) {
  if (s == "json") return ReportFormat::Json;
  if (s == "csv") return ReportFormat::Csv;
  return std::nullopt;
}

namespace detail {

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "infinity" : "-infinity";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

inline std::string json_number(double v) {
  if (std::isinf(v) || std::isnan(v)) return '"' + format_number(v) + '"';
  return format_number(v);
}

inline std::string json_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Tiny ordered JSON object writer; keys are emitted in call order.
class JsonObject {
 public:
  void raw(std::string_view key, std::string_view value) {
    if (!fields_.empty()) fields_ += ',';
    fields_ += json_escape(key);
    fields_ += ':';
    fields_ += value;
  }
  void number(std::string_view key, double v) { raw(key, json_number(v)); }
  void integer(std::string_view key, std::int64_t v) {
    raw(key, std::to_string(v));
  }
  void unsigned_integer(std::string_view key, std::uint64_t v) {
    raw(key, std::to_string(v));
  }
  void text(std::string_view key, std::string_view v) {
    raw(key, json_escape(v));
  }
  void boolean(std::string_view key, bool v) { raw(key, v ? "true" : "false"); }

  std::string str() const { return "{" + fields_ + "}"; }

 private:
  std::string fields_;
};

inline std::string json_stat(const SummaryStat& s) {
  JsonObject o;
  o.number("value", s.value);
  o.number("se", s.se);
  return o.str();
}

inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
  return out;
}

template <typename T>
std::string per_class_json(const PerClass<T>& values,
                           std::string (*fmt)(const T&)) {
  JsonObject o;
  for (auto kind : kAttackerKinds) {
    o.raw(std::string(to_string(kind)) + "s", fmt(values[index_of(kind)]));
  }
  return o.str();
}

}  // namespace detail

inline std::string emit_report(const AnalyticReport& r, ReportFormat format) {
  using detail::format_number;
  if (format == ReportFormat::Json) {
    detail::JsonObject o;
    o.text("report", "analytic");
    o.text("composition_mode", to_string(r.mode));
    o.raw("residual_counts",
          detail::per_class_json<double>(r.residual.counts, [](const double& v) {
            return detail::json_number(v);
          }));
    o.number("residual_total", r.residual.total);
    o.number("residual_fraction", r.residual.fraction);
    o.number("scaled_time_hours", r.scaled_time_hours);
    o.raw("composed_lambda",
          detail::per_class_json<double>(r.composed_lambda, [](const double& v) {
            return detail::json_number(v);
          }));
    o.number("ale", r.ale);
    o.number("aggregate_rate_per_hour", r.aggregate_rate_per_hour);
    return o.str() + "\n";
  }
  std::string out = detail::csv_line(
      {"composition_mode", "residual_worms", "residual_bots", "residual_skids",
       "residual_hackers", "residual_total", "residual_fraction",
       "scaled_time_hours", "lambda_worms", "lambda_bots", "lambda_skids",
       "lambda_hackers", "ale", "aggregate_rate_per_hour"});
  std::vector<std::string> row{std::string(to_string(r.mode))};
  for (auto kind : kAttackerKinds)
    row.push_back(format_number(r.residual.counts[index_of(kind)]));
  row.push_back(format_number(r.residual.total));
  row.push_back(format_number(r.residual.fraction));
  row.push_back(format_number(r.scaled_time_hours));
  for (auto kind : kAttackerKinds)
    row.push_back(format_number(r.composed_lambda[index_of(kind)]));
  row.push_back(format_number(r.ale));
  row.push_back(format_number(r.aggregate_rate_per_hour));
  return out + detail::csv_line(row);
}

inline std::string emit_report(const SimReport& r, ReportFormat format) {
  using detail::format_number;
  if (format == ReportFormat::Json) {
    detail::JsonObject o;
    o.text("report", "simulation");
    o.integer("trials", r.trials);
    o.unsigned_integer("seed", r.seed);
    o.text("composition_mode", to_string(r.mode));
    o.number("horizon_hours", r.horizon_hours);
    o.raw("per_class_filtered",
          detail::per_class_json<SummaryStat>(
              r.filtered,
              [](const SummaryStat& s) { return detail::json_stat(s); }));
    if (r.first_compromise_hours) {
      const auto& t = *r.first_compromise_hours;
      detail::JsonObject stats;
      stats.integer("samples", t.samples);
      stats.number("mean", t.mean_hours);
      stats.number("se", t.se_hours);
      stats.number("p5", t.p5_hours);
      stats.number("p95", t.p95_hours);
      o.raw("first_compromise_hours", stats.str());
    } else {
      o.raw("first_compromise_hours", "null");
    }
    o.raw("compromise_probability_within_horizon",
          detail::json_stat(r.compromise_probability_within_horizon));
    return o.str() + "\n";
  }
  std::string out = detail::csv_line(
      {"trials", "seed", "composition_mode", "horizon_hours",
       "filtered_worms_mean", "filtered_worms_se", "filtered_bots_mean",
       "filtered_bots_se", "filtered_skids_mean", "filtered_skids_se",
       "filtered_hackers_mean", "filtered_hackers_se",
       "first_compromise_samples", "first_compromise_mean_hours",
       "first_compromise_se_hours", "first_compromise_p5_hours",
       "first_compromise_p95_hours", "compromise_probability_within_horizon",
       "compromise_probability_se"});
  std::vector<std::string> row{std::to_string(r.trials), std::to_string(r.seed),
                               std::string(to_string(r.mode)),
                               format_number(r.horizon_hours)};
  for (auto kind : kAttackerKinds) {
    const auto& s = r.filtered[index_of(kind)];
    row.push_back(format_number(s.value));
    row.push_back(format_number(s.se));
  }
  if (r.first_compromise_hours) {
    const auto& t = *r.first_compromise_hours;
    row.push_back(std::to_string(t.samples));
    row.push_back(format_number(t.mean_hours));
    row.push_back(format_number(t.se_hours));
    row.push_back(format_number(t.p5_hours));
    row.push_back(format_number(t.p95_hours));
  } else {
    for (int i = 0; i < 5; ++i) row.push_back("");
  }
  row.push_back(format_number(r.compromise_probability_within_horizon.value));
  row.push_back(format_number(r.compromise_probability_within_horizon.se));
  return out + detail::csv_line(row);
}

inline std::string emit_report(const FleetReport& r, ReportFormat format) {
  using detail::format_number;
  if (format == ReportFormat::Json) {
    detail::JsonObject o;
    o.text("report", "fleet");
    o.integer("instances", r.instances);
    o.text("secret_mode", to_string(r.secret_mode));
    o.integer("trials", r.trials);
    o.unsigned_integer("seed", r.seed);
    o.raw("mean_compromised_instances",
          detail::json_stat(r.mean_compromised_instances));
    o.raw("probability_all_compromised",
          detail::json_stat(r.probability_all_compromised));
    return o.str() + "\n";
  }
  std::string out = detail::csv_line(
      {"instances", "secret_mode", "trials", "seed",
       "mean_compromised_instances", "mean_compromised_se",
       "probability_all_compromised", "probability_all_se"});
  return out + detail::csv_line(
                   {std::to_string(r.instances),
                    std::string(to_string(r.secret_mode)),
                    std::to_string(r.trials), std::to_string(r.seed),
                    format_number(r.mean_compromised_instances.value),
                    format_number(r.mean_compromised_instances.se),
                    format_number(r.probability_all_compromised.value),
                    format_number(r.probability_all_compromised.se)});
}

inline std::string emit_report(const EpochReport& r, ReportFormat format) {
  using detail::format_number;
  if (format == ReportFormat::Json) {
    detail::JsonObject o;
    o.text("report", "epochs");
    o.number("epoch_hours", r.epoch_hours);
    o.number("horizon_hours", r.horizon_hours);
    o.integer("trials", r.trials);
    o.unsigned_integer("seed", r.seed);
    o.number("knowledge_reset", r.knowledge_reset);
    o.integer("full_epochs_entered", r.full_epochs_entered);
    if (r.per_epoch_compromise_probability) {
      o.raw("per_epoch_compromise_probability",
            detail::json_stat(*r.per_epoch_compromise_probability));
    } else {
      o.raw("per_epoch_compromise_probability", "null");
    }
    o.raw("mean_epochs_survived", detail::json_stat(r.mean_epochs_survived));
    o.raw("horizon_compromise_probability",
          detail::json_stat(r.horizon_compromise_probability));
    return o.str() + "\n";
  }
  std::string out = detail::csv_line(
      {"epoch_hours", "horizon_hours", "trials", "seed", "knowledge_reset",
       "full_epochs_entered", "per_epoch_compromise_probability",
       "per_epoch_compromise_se", "mean_epochs_survived",
       "mean_epochs_survived_se", "horizon_compromise_probability",
       "horizon_compromise_se"});
  std::vector<std::string> row{
      format_number(r.epoch_hours), format_number(r.horizon_hours),
      std::to_string(r.trials), std::to_string(r.seed),
      format_number(r.knowledge_reset), std::to_string(r.full_epochs_entered)};
  if (r.per_epoch_compromise_probability) {
    row.push_back(format_number(r.per_epoch_compromise_probability->value));
    row.push_back(format_number(r.per_epoch_compromise_probability->se));
  } else {
    row.push_back("");
    row.push_back("");
  }
  row.push_back(format_number(r.mean_epochs_survived.value));
  row.push_back(format_number(r.mean_epochs_survived.se));
  row.push_back(format_number(r.horizon_compromise_probability.value));
  row.push_back(format_number(r.horizon_compromise_probability.se));
  return out + detail::csv_line(row);
}

// Crack-time calculator result, for the CLI.
struct CrackReport {
  std::int64_t length = 0;
  std::int64_t charset_size = 0;
  double guess_rate_per_second = 0.0;
  double keyspace = 0.0;
  double expected_seconds = 0.0;

  bool operator==(const CrackReport&) const = default;
};

inline CrackReport make_crack_report(std::int64_t length,
                                     std::int64_t charset_size,
                                     double guess_rate_per_second) {
  CrackReport r;
  r.length = length;
  r.charset_size = charset_size;
  r.guess_rate_per_second = guess_rate_per_second;
  r.keyspace = std::pow(static_cast<double>(charset_size),
                        static_cast<double>(length));
  r.expected_seconds =
      crack_time_seconds(length, charset_size, guess_rate_per_second);
  return r;
}

inline std::string emit_report(const CrackReport& r, ReportFormat format) {
  using detail::format_number;
  const double hours = r.expected_seconds / 3600.0;
  const double days = hours / 24.0;
  if (format == ReportFormat::Json) {
    detail::JsonObject o;
    o.text("report", "crack");
    o.integer("length", r.length);
    o.integer("charset_size", r.charset_size);
    o.number("guess_rate_per_second", r.guess_rate_per_second);
    o.number("keyspace", r.keyspace);
    o.number("expected_seconds", r.expected_seconds);
    o.number("expected_hours", hours);
    o.number("expected_days", days);
    return o.str() + "\n";
  }
  std::string out = detail::csv_line({"length", "charset_size",
                                      "guess_rate_per_second", "keyspace",
                                      "expected_seconds", "expected_hours",
                                      "expected_days"});
  return out + detail::csv_line({std::to_string(r.length),
                                 std::to_string(r.charset_size),
                                 format_number(r.guess_rate_per_second),
                                 format_number(r.keyspace),
                                 format_number(r.expected_seconds),
                                 format_number(hours), format_number(days)});
}

inline std::string emit_catalog(const std::vector<CatalogEntry>& entries,
                                ReportFormat format) {
  using detail::format_number;
  if (format == ReportFormat::Json) {
    std::string items;
    for (const auto& e : entries) {
      if (!items.empty()) items += ',';
      detail::JsonObject o;
      o.text("name", e.measure.name);
      o.text("provenance", to_string(e.provenance));
      o.text("description", e.description);
      o.raw("filter_fractions",
            detail::per_class_json<double>(
                e.measure.filter_fractions,
                [](const double& v) { return detail::json_number(v); }));
      o.raw("work_factors",
            detail::per_class_json<double>(
                e.measure.work_factors,
                [](const double& v) { return detail::json_number(v); }));
      o.boolean("independent", e.measure.independent);
      items += o.str();
    }
    detail::JsonObject o;
    o.text("report", "catalog");
    o.raw("entries", "[" + items + "]");
    return o.str() + "\n";
  }
  std::string out = detail::csv_line(
      {"name", "provenance", "description", "ff_worms", "ff_bots", "ff_skids",
       "ff_hackers", "wf_worms", "wf_bots", "wf_skids", "wf_hackers",
       "independent"});
  for (const auto& e : entries) {
    std::vector<std::string> row{detail::csv_field(e.measure.name),
                                 std::string(to_string(e.provenance)),
                                 detail::csv_field(e.description)};
    for (auto kind : kAttackerKinds)
      row.push_back(format_number(e.measure.filter_fraction(kind)));
    for (auto kind : kAttackerKinds)
      row.push_back(format_number(e.measure.work_factor(kind)));
    row.push_back(e.measure.independent ? "true" : "false");
    out += detail::csv_line(row);
  }
  return out;
}

}  // namespace obscura
