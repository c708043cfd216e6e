#pragma once

#include "wcpd/saddle.hpp"
#include "wcpd/solver.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

namespace wcpd {

inline constexpr char const *kTraceHeader = "n,dist,H,eps,objective,residual";

/// One CSV line (no newline). Missing values are empty fields; numbers use
/// 17 significant digits.
std::string format_trace_row(TraceRow const &row);

using Metadata = std::map<std::string, std::string>;

Metadata trace_metadata(std::string const &experiment, Regime regime, StepConfig const &cfg,
                        std::optional<std::uint64_t> seed);

/// Sidecar path for a trace: "trace.csv" -> "trace.csv.meta".
std::filesystem::path metadata_path(std::filesystem::path const &trace);

void write_metadata(std::filesystem::path const &path, Metadata const &meta);
Metadata read_metadata(std::filesystem::path const &path);

/// Streams rows to disk as they are produced and flushes each one, so an
/// interrupted run leaves a readable prefix. Throws IoError on
/// I/O failure.
class TraceWriter
{
public:
  explicit TraceWriter(std::filesystem::path const &path);
  void write(TraceRow const &row);
  void finish(Metadata const &final_meta, std::filesystem::path const &meta_path);

private:
  std::ofstream out_;
  std::filesystem::path path_;
};

void write_trace_csv(std::filesystem::path const &path, IterateTrace const &trace);

void write_contour_csv(std::filesystem::path const &path, std::vector<ContourPoint> const &points);

std::string format_double(double v);

} // namespace wcpd
