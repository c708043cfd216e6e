#include "wcpd/trace_io.hpp"

#include "wcpd/errors.hpp"

#include <fmt/format.h>

#include <stdexcept>

namespace wcpd {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

void append_field(std::string &line, std::optional<double> const &v)
{
  line += ',';
  if (v) { line += format_double(*v); }
}

void check_stream(std::ostream const &out, std::filesystem::path const &path)
{
  if (!out) { throw IoError("I/O error writing " + path.string()); }
}

} // namespace

std::string format_trace_row(TraceRow const &row)
{
  std::string line = std::to_string(row.n);
  append_field(line, row.dist);
  append_field(line, row.H);
  append_field(line, row.eps);
  append_field(line, row.objective);
  append_field(line, row.residual);
  return line;
}

Metadata trace_metadata(std::string const &experiment, Regime regime, StepConfig const &cfg,
                        std::optional<std::uint64_t> seed)
{
  Metadata meta;
  meta["experiment"] = experiment;
  meta["regime"] = to_string(regime);
  meta["sigma"] = format_double(cfg.sigma);
  meta["tau"] = format_double(cfg.tau);
  meta["theta"] = format_double(cfg.theta);
  meta["seed"] = seed ? std::to_string(*seed) : "";
  return meta;
}

std::filesystem::path metadata_path(std::filesystem::path const &trace)
{
  auto p = trace;
  p += ".meta";
  return p;
}

void write_metadata(std::filesystem::path const &path, Metadata const &meta)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) { throw IoError("cannot write " + path.string()); }
  for (auto const &[k, v] : meta) { out << k << '=' << v << '\n'; }
  out.flush();
  check_stream(out, path);
}

Metadata read_metadata(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in) { throw IoError("cannot open " + path.string()); }
  Metadata meta;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') { continue; }
    auto const eq = line.find('=');
    if (eq == std::string::npos) { throw IoError("malformed metadata line: " + line); }
    meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return meta;
}

TraceWriter::TraceWriter(std::filesystem::path const &path)
  : out_(path, std::ios::binary)
  , path_(path)
{
  if (!out_) { throw IoError("cannot write " + path.string()); }
  out_ << kTraceHeader << '\n';
  out_.flush();
  check_stream(out_, path_);
}

void TraceWriter::write(TraceRow const &row)
{
  out_ << format_trace_row(row) << '\n';
  out_.flush();
  check_stream(out_, path_);
}

void TraceWriter::finish(Metadata const &final_meta, std::filesystem::path const &meta_path)
{
  out_.close();
  check_stream(out_, path_);
  write_metadata(meta_path, final_meta);
}

void write_trace_csv(std::filesystem::path const &path, IterateTrace const &trace)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) { throw IoError("cannot write " + path.string()); }
  out << kTraceHeader << '\n';
  for (auto const &row : trace.rows) { out << format_trace_row(row) << '\n'; }
  check_stream(out, path);
}

void write_contour_csv(std::filesystem::path const &path, std::vector<ContourPoint> const &points)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) { throw IoError("cannot write " + path.string()); }
  out << "x,y,value\n";
  for (auto const &p : points) {
    out << format_double(p.x) << ',' << format_double(p.y) << ',' << format_double(p.value) << '\n';
  }
  check_stream(out, path);
}

} // namespace wcpd
