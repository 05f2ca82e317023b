#include "hwlab/io.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace hwlab {
namespace {

static_assert(std::endian::native == std::endian::little, "HWF1 I/O assumes a little-endian host");

constexpr char kMagic[4] = {'H', 'W', 'F', '1'};

template <class T>
void put(std::ostream& out, T v) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  out.write(bytes, sizeof(T));
}

template <class T>
T get(std::istream& in, const char* what) {
  char bytes[sizeof(T)];
  if (!in.read(bytes, sizeof(T))) throw Error(std::string("HWF1: truncated header (") + what + ")");
  T v;
  std::memcpy(&v, bytes, sizeof(T));
  return v;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

void write_field(std::ostream& out, const Field& f) {
  const GridSpec& g = f.grid();
  out.write(kMagic, 4);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(g.n));
  put<double>(out, g.box_length);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(f.space()));
  for (const auto& z : f.values()) {
    put<double>(out, z.real());
    put<double>(out, z.imag());
  }
  if (!out) throw Error("HWF1: write failed");
}

Field read_field(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4)) throw Error("not an HWF1 file (shorter than the magic)");
  if (std::memcmp(magic, kMagic, 3) != 0) throw Error("not an HWF1 file");
  if (magic[3] != '1') {
    if (magic[3] >= '0' && magic[3] <= '9') {
      throw Error(std::string("unsupported HWF version ") + magic[3]);
    }
    throw Error("not an HWF1 file");
  }
  const auto dim = get<std::uint32_t>(in, "dimension");
  const auto n = get<std::uint32_t>(in, "points");
  const auto box = get<double>(in, "box length");
  const auto space = get<std::uint8_t>(in, "space flag");
  if (space > 1) throw Error("HWF1: invalid space flag " + std::to_string(space));
  GridSpec g{static_cast<int>(dim), static_cast<int>(n), box};
  try {
    g.validate();
  } catch (const Error& e) {
    throw Error(std::string("HWF1: invalid header: ") + e.what());
  }
  const std::size_t count = g.size();
  std::vector<cplx> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    double re = 0.0, im = 0.0;
    char bytes[16];
    if (!in.read(bytes, 16)) {
      std::ostringstream msg;
      msg << "HWF1: truncated payload: header declares " << count << " values, found " << i;
      throw Error(msg.str());
    }
    std::memcpy(&re, bytes, 8);
    std::memcpy(&im, bytes + 8, 8);
    values[i] = {re, im};
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw Error("HWF1: payload longer than the header declares");
  }
  return Field(g, std::move(values), static_cast<Space>(space));
}

void write_field(const std::filesystem::path& path, const Field& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_field(out, f);
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_field(in);
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::pass: return exit_pass;
    case Verdict::fail: return exit_fail;
    case Verdict::inconclusive: return exit_inconclusive;
  }
  return exit_error;
}

std::string series_csv(const Series& s) {
  std::ostringstream out;
  for (std::size_t i = 0; i < s.columns.size(); ++i) out << (i ? "," : "") << s.columns[i];
  out << "\n";
  for (const auto& row : s.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_number(row[i]);
    out << "\n";
  }
  return out.str();
}

int emit_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  if (report.series.rows.empty()) throw Error("report '" + report.name + "' has no data points");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
  write_text(dir / "report.json", to_json(report).dump(2) + "\n");
  write_text(dir / "series.csv", series_csv(report.series));

  nlohmann::ordered_json meta;
  meta["name"] = report.name;
  meta["runtime_seconds"] = report.runtime_seconds;
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream ts;
  ts << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  meta["timestamp"] = ts.str();
  write_text(dir / "metadata.json", meta.dump(2) + "\n");
  return exit_code(report.verdict);
}

}  // namespace hwlab
