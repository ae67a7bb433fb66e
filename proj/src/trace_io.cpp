#include "netoco/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace netoco::harness {

namespace {
std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void emit_trace(const oco::RegretTrace& trace, const std::filesystem::path& path) {
  std::string body = "t,loss,cum_loss,comparator_cum_loss,regret,avg_regret\n";
  for (const auto& r : trace.rows) {
    body += std::to_string(r.t);
    body += ',';
    body += fmt17(r.loss);
    body += ',';
    body += fmt17(r.cum_loss);
    body += ',';
    body += fmt17(r.comparator_cum_loss);
    body += ',';
    body += fmt17(r.regret);
    body += ',';
    body += fmt17(r.avg_regret);
    body += '\n';
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for write: " + tmp.string());
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path.string() + ": " + ec.message());
}

oco::RegretTrace parse_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trace file: " + path.string());
  if (line != "t,loss,cum_loss,comparator_cum_loss,regret,avg_regret")
    throw IoError("unexpected trace header: " + line);
  oco::RegretTrace trace;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    oco::RegretRecord rec;
    auto next = [&](const char* what) {
      if (!std::getline(row, field, ','))
        throw IoError("trace line " + std::to_string(lineno) + ": missing " + what);
      return field;
    };
    rec.t = std::stoi(next("t"));
    rec.loss = std::stod(next("loss"));
    rec.cum_loss = std::stod(next("cum_loss"));
    rec.comparator_cum_loss = std::stod(next("comparator_cum_loss"));
    rec.regret = std::stod(next("regret"));
    rec.avg_regret = std::stod(next("avg_regret"));
    trace.rows.push_back(rec);
  }
  return trace;
}

double regret_column_discrepancy(const oco::RegretTrace& trace) {
  double worst = 0.0;
  for (const auto& r : trace.rows)
    worst = std::max(worst, std::abs(r.regret - (r.cum_loss - r.comparator_cum_loss)));
  return worst;
}

}  // namespace netoco::harness
