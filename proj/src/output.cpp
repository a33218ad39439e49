#include "mac/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "mac/errors.hpp"
#include "mac/experiments.hpp"

namespace mac {

namespace {

constexpr double kDetRange = 1.05;

void put_u64_le(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(bytes, 8);
}

std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void put_f64_le(std::ostream& out, std::span<const double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  } else {
    for (double v : values) put_u64_le(out, std::bit_cast<std::uint64_t>(v));
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(path.string(), fmt::format("write to '{}' failed", path.string()));
}

void write_snapshot_payload(const SnapshotHeader& h, std::span<const double> values, const std::filesystem::path& path) {
  if (values.size() != h.element_count()) {
    throw IoError(path.string(), fmt::format("payload has {} values but the header describes {}", values.size(),
                                             h.element_count()));
  }
  const nlohmann::json header = {
      {"schema_version", h.schema_version},
      {"d", h.d},
      {"n", h.n},
      {"m", h.m},
      {"t", h.t},
      {"payload", h.payload == PayloadKind::field ? "field" : "determinant"},
      {"byte_order", "little"},
      {"element_type", "float64"},
      {"count", h.element_count()},
  };
  const std::string text = header.dump();
  auto out = open_out(path);
  put_u64_le(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  put_f64_le(out, values);
  finish_write(out, path);
}

}  // namespace

void write_monitor_csv(const MonitorSeries& series, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "t,sup_frob,energy\n";
  for (const auto& r : series.records()) out << fmt::format("{:.17g},{:.17g},{:.17g}\n", r.t, r.sup_norm, r.energy);
  finish_write(out, path);
}

MonitorSeries read_monitor_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), fmt::format("cannot open '{}'", path.string()));
  std::string line;
  if (!std::getline(in, line) || line != "t,sup_frob,energy") {
    throw IoError(path.string(), "monitor CSV must start with the header 't,sup_frob,energy'");
  }
  MonitorSeries series;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    MonitorRecord r;
    double* fields[3] = {&r.t, &r.sup_norm, &r.energy};
    const char* p = line.c_str();
    for (int i = 0; i < 3; ++i) {
      char* end = nullptr;
      *fields[i] = std::strtod(p, &end);
      if (end == p || (i < 2 && *end != ',') || (i == 2 && *end != '\0')) {
        throw IoError(path.string(), fmt::format("malformed monitor row at line {}", lineno));
      }
      p = end + 1;
    }
    series.append(r);
  }
  return series;
}

std::size_t SnapshotHeader::element_count() const {
  std::size_t cells = 1;
  for (int a = 0; a < d; ++a) cells *= static_cast<std::size_t>(n);
  return payload == PayloadKind::field ? cells * static_cast<std::size_t>(m * m) : cells;
}

void write_snapshot(const MatrixField& field, double t, const std::filesystem::path& path) {
  SnapshotHeader h;
  h.d = field.grid().d;
  h.n = field.grid().n;
  h.m = field.m();
  h.t = t;
  h.payload = PayloadKind::field;
  // planar -> cell-major
  std::vector<double> values(field.raw().size());
  const auto mm = static_cast<std::size_t>(field.entry_count());
  for (std::size_t c = 0; c < field.cell_count(); ++c) field.gather(c, std::span<double>(values).subspan(c * mm, mm));
  write_snapshot_payload(h, values, path);
}

void write_determinant_snapshot(const GridSpec& grid, int m, std::span<const double> det, double t,
                                const std::filesystem::path& path) {
  SnapshotHeader h;
  h.d = grid.d;
  h.n = grid.n;
  h.m = m;
  h.t = t;
  h.payload = PayloadKind::determinant;
  write_snapshot_payload(h, det, path);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), fmt::format("cannot open '{}'", path.string()));
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto bad = [&](const std::string& why) { return IoError(path.string(), fmt::format("{}: {}", path.string(), why)); };
  if (bytes.size() < 8) throw bad("truncated header length");
  const std::uint64_t header_len = get_u64_le(reinterpret_cast<const unsigned char*>(bytes.data()));
  if (header_len > bytes.size() - 8) throw bad("truncated header");

  Snapshot snap;
  try {
    const auto j = nlohmann::json::parse(bytes.substr(8, header_len));
    snap.header.schema_version = j.at("schema_version").get<int>();
    snap.header.d = j.at("d").get<int>();
    snap.header.n = j.at("n").get<int>();
    snap.header.m = j.at("m").get<int>();
    snap.header.t = j.at("t").get<double>();
    const auto payload = j.at("payload").get<std::string>();
    if (payload != "field" && payload != "determinant") throw bad("unknown payload '" + payload + "'");
    snap.header.payload = payload == "field" ? PayloadKind::field : PayloadKind::determinant;
    if (j.at("byte_order").get<std::string>() != "little" || j.at("element_type").get<std::string>() != "float64") {
      throw bad("unsupported byte order or element type");
    }
    if (j.at("count").get<std::size_t>() != snap.header.element_count()) throw bad("count disagrees with grid shape");
  } catch (const nlohmann::json::exception& e) {
    throw bad(std::string("invalid header: ") + e.what());
  }
  if (snap.header.schema_version != 1) throw bad("unsupported schema_version");

  const std::size_t count = snap.header.element_count();
  const std::size_t offset = 8 + header_len;
  if (bytes.size() - offset != count * sizeof(double)) {
    throw bad(fmt::format("payload holds {} bytes, header requires {}", bytes.size() - offset, count * sizeof(double)));
  }
  snap.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    snap.values[i] = std::bit_cast<double>(get_u64_le(reinterpret_cast<const unsigned char*>(bytes.data()) + offset + 8 * i));
  }
  return snap;
}

MatrixField snapshot_to_field(const Snapshot& snap) {
  if (snap.header.payload != PayloadKind::field) throw std::invalid_argument("snapshot holds a determinant, not a field");
  MatrixField f(GridSpec(snap.header.d, snap.header.n), snap.header.m);
  const auto mm = static_cast<std::size_t>(f.entry_count());
  for (std::size_t c = 0; c < f.cell_count(); ++c) {
    f.scatter(c, std::span<const double>(snap.values).subspan(c * mm, mm));
  }
  return f;
}

std::uint16_t determinant_gray_level(double det) {
  const double s = std::clamp((det + kDetRange) / (2.0 * kDetRange), 0.0, 1.0);
  return static_cast<std::uint16_t>(std::lround(s * 65535.0));
}

void write_determinant_pgm(const GridSpec& grid, std::span<const double> det, const std::filesystem::path& path) {
  if (grid.d != 2) throw std::invalid_argument("PGM output needs a 2D grid");
  if (det.size() != grid.cell_count()) {
    throw IoError(path.string(), fmt::format("determinant field has {} values, grid has {} cells", det.size(),
                                             grid.cell_count()));
  }
  const int n = grid.n;
  auto out = open_out(path);
  out << "P5\n" << n << " " << n << "\n65535\n";
  std::vector<char> row(static_cast<std::size_t>(2 * n));
  for (int y = n - 1; y >= 0; --y) {
    for (int x = 0; x < n; ++x) {
      const std::uint16_t g = determinant_gray_level(det[grid.index({x, y, 0})]);
      row[static_cast<std::size_t>(2 * x)] = static_cast<char>(g >> 8);
      row[static_cast<std::size_t>(2 * x + 1)] = static_cast<char>(g & 0xffu);
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  finish_write(out, path);
}

std::string time_tag(double t) { return fmt::format("t{:013.6f}", t); }

DirectorySink::DirectorySink(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError(dir_.string(), fmt::format("cannot create output directory '{}': {}", dir_.string(), ec.message()));
  const auto csv_path = dir_ / "monitor.csv";
  csv_.open(csv_path, std::ios::trunc);
  if (!csv_) throw IoError(csv_path.string(), fmt::format("cannot open '{}' for writing", csv_path.string()));
  csv_ << "t,sup_frob,energy\n";
  written_.push_back(csv_path);
}

void DirectorySink::monitor(const MonitorRecord& r) {
  csv_ << fmt::format("{:.17g},{:.17g},{:.17g}\n", r.t, r.sup_norm, r.energy);
  csv_.flush();
  if (!csv_) throw IoError((dir_ / "monitor.csv").string(), "write to monitor.csv failed");
}

void DirectorySink::snapshot(const MatrixField& field, double t) {
  const std::string tag = time_tag(t);
  const auto det = determinant_field(field);
  const auto field_path = dir_ / ("field_" + tag + ".bin");
  const auto det_path = dir_ / ("det_" + tag + ".bin");
  write_snapshot(field, t, field_path);
  write_determinant_snapshot(field.grid(), field.m(), det, t, det_path);
  written_.push_back(field_path);
  written_.push_back(det_path);

  const GridSpec& g = field.grid();
  if (g.d == 2) {
    const auto pgm = dir_ / ("det_" + tag + ".pgm");
    write_determinant_pgm(g, det, pgm);
    written_.push_back(pgm);
  } else if (g.d == 3) {
    const GridSpec plane(2, g.n);
    std::vector<double> slice(plane.cell_count());
    const int z = g.n / 2;
    for (int x = 0; x < g.n; ++x)
      for (int y = 0; y < g.n; ++y) slice[plane.index({x, y, 0})] = det[g.index({x, y, z})];
    const auto pgm = dir_ / ("det_" + tag + "_zmid.pgm");
    write_determinant_pgm(plane, slice, pgm);
    written_.push_back(pgm);
  }
}

RunOutcome run_config(const SimConfig& config) {
  validate_config(config);
  const MatrixField u0 =
      make_initial_condition(config.initial_condition.name, config.grid, config.initial_condition.params);

  DirectorySink sink(config.output_dir);
  {
    const auto cfg_path = config.output_dir / "config.yaml";
    auto out = open_out(cfg_path);
    out << serialize_config(config);
    finish_write(out, cfg_path);
  }

  RunParams params;
  params.kappa = config.kappa;
  params.epsilon = config.epsilon;
  params.tau = config.tau;
  params.t_end = config.t_end;
  params.scheme = config.scheme;
  params.monitor_stride = config.monitor_stride;
  params.snapshot_times = config.snapshot_times;

  RunOutcome outcome;
  outcome.series = run_simulation(params, u0, &sink);
  outcome.mbp = check_mbp(outcome.series, config.m, 1e-9);
  outcome.energy = check_energy_monotone(outcome.series, 1e-10);
  outcome.mbp_expected = config.kappa >= mbp_kappa_threshold(config.m);
  outcome.energy_expected = config.kappa >= energy_kappa_threshold(config.m);
  return outcome;
}

}  // namespace mac
