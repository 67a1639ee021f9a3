#include "swarmcl/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <zlib.h>

namespace swarmcl::io {

namespace {

constexpr char kDatasetMagic[4] = {'S', 'W', 'C', 'L'};
constexpr char kCheckpointMagic[4] = {'S', 'W', 'C', 'K'};

class ByteWriter {
 public:
  void magic(const char (&m)[4]) { bytes_.insert(bytes_.end(), m, m + 4); }
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void f64s(std::span<const double> vs) {
    for (double v : vs) f64(v);
  }

  std::vector<std::uint8_t> finish() {
    u32(checksum(std::span(bytes_).subspan(4)));
    return std::move(bytes_);
  }

  static std::uint32_t checksum(std::span<const std::uint8_t> payload) {
    return static_cast<std::uint32_t>(
        crc32(0L, payload.data(), static_cast<uInt>(payload.size())));
  }

 private:
  void put(std::uint64_t v, int width) {
    for (int b = 0; b < width; ++b) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }

  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, const char* what) : bytes_(bytes), what_(what) {}

  void expect_magic(const char (&m)[4]) {
    if (bytes_.size() < 4 || std::memcmp(bytes_.data(), m, 4) != 0) {
      throw IoError(ErrorKind::kBadMagic, std::string(what_) + ": bad magic");
    }
    pos_ = 4;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  // Verifies the trailing CRC; the reader must sit right before it.
  void expect_checksum() {
    if (remaining() != 4) {
      throw IoError(ErrorKind::kSizeMismatch, std::string(what_) + ": " +
                                                  std::to_string(remaining()) +
                                                  " bytes left where the checksum should be");
    }
    const std::uint32_t stored = u32();
    const std::uint32_t actual = ByteWriter::checksum(bytes_.subspan(4, bytes_.size() - 8));
    if (stored != actual) throw IoError(ErrorKind::kChecksum, std::string(what_) + ": CRC mismatch");
  }

 private:
  std::uint64_t get(int width) {
    if (remaining() < static_cast<std::size_t>(width)) {
      throw IoError(ErrorKind::kSizeMismatch, std::string(what_) + ": truncated");
    }
    std::uint64_t v = 0;
    for (int b = 0; b < width; ++b) v |= static_cast<std::uint64_t>(bytes_[pos_ + b]) << (8 * b);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

void check_version(std::uint16_t version, std::uint16_t expected, const char* what) {
  if (version != expected) {
    throw IoError(ErrorKind::kBadVersion, std::string(what) + ": unsupported version " +
                                              std::to_string(version));
  }
}

// Compares the trailing CRC with the payload before bulk decoding.
void verify_trailing_checksum(std::span<const std::uint8_t> bytes, const char* what) {
  if (bytes.size() < 8) throw IoError(ErrorKind::kSizeMismatch, std::string(what) + ": truncated");
  std::uint32_t stored = 0;
  for (int b = 0; b < 4; ++b) {
    stored |= static_cast<std::uint32_t>(bytes[bytes.size() - 4 + b]) << (8 * b);
  }
  if (stored != ByteWriter::checksum(bytes.subspan(4, bytes.size() - 8))) {
    throw IoError(ErrorKind::kChecksum, std::string(what) + ": CRC mismatch");
  }
}

void write_header_world(ByteWriter& w, const WorldSpec& world) {
  w.f64(world.arena_half_extent);
  w.u8(world.wall ? 1 : 0);
  if (world.wall) {
    w.f64(world.wall->y);
    w.f64(world.wall->gap_center);
    w.f64(world.wall->gap_half_width);
    w.f64(world.wall->thickness);
  }
  w.f64(world.comm_radius);
  w.f64(world.u_max);
}

DatasetHeader read_header(ByteReader& r) {
  r.expect_magic(kDatasetMagic);
  DatasetHeader h;
  h.version = r.u16();
  check_version(h.version, kDatasetVersion, "dataset");
  const std::uint8_t task = r.u8();
  if (task > 1) throw IoError(ErrorKind::kInvalidContent, "dataset: unknown task id " + std::to_string(task));
  h.task = static_cast<Task>(task);
  h.robots = r.u16();
  h.trajectories = r.u32();
  h.horizon = r.u32();
  h.dt = r.f64();
  h.world.task = h.task;
  h.world.dt = h.dt;
  h.world.arena_half_extent = r.f64();
  const std::uint8_t has_wall = r.u8();
  if (has_wall > 1) throw IoError(ErrorKind::kInvalidContent, "dataset: bad wall flag");
  if (has_wall) {
    Wall wall;
    wall.y = r.f64();
    wall.gap_center = r.f64();
    wall.gap_half_width = r.f64();
    wall.thickness = r.f64();
    h.world.wall = wall;
  }
  h.world.comm_radius = r.f64();
  h.world.u_max = r.f64();
  return h;
}

}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kOpen: return "open";
    case ErrorKind::kBadMagic: return "bad-magic";
    case ErrorKind::kBadVersion: return "bad-version";
    case ErrorKind::kSizeMismatch: return "size-mismatch";
    case ErrorKind::kChecksum: return "checksum";
    case ErrorKind::kEmptyDataset: return "empty-dataset";
    case ErrorKind::kInvalidContent: return "invalid-content";
  }
  return "unknown";
}

IoError::IoError(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

// ---------------------------------------------------------------------------
// Dataset

std::vector<std::uint8_t> encode_dataset(const Dataset& data) {
  if (data.trajectories.empty()) throw IoError(ErrorKind::kEmptyDataset, "empty dataset");
  try {
    data.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(ErrorKind::kInvalidContent, std::string("dataset: ") + e.what());
  }
  const std::size_t n = data.robot_count();
  const std::size_t K = data.horizon();
  if (n > 0xffff || data.size() > 0xffffffffULL || K > 0xffffffffULL) {
    throw IoError(ErrorKind::kInvalidContent, "dataset: dimensions exceed the format's field widths");
  }

  ByteWriter w;
  w.magic(kDatasetMagic);
  w.u16(kDatasetVersion);
  w.u8(static_cast<std::uint8_t>(data.world.task));
  w.u16(static_cast<std::uint16_t>(n));
  w.u32(static_cast<std::uint32_t>(data.size()));
  w.u32(static_cast<std::uint32_t>(K));
  w.f64(data.world.dt);
  write_header_world(w, data.world);
  for (const Trajectory& t : data.trajectories) {
    for (const Vec2& g : t.world.goals) {
      w.f64(g.x);
      w.f64(g.y);
    }
  }
  for (const Trajectory& t : data.trajectories) {
    for (const SwarmState& s : t.samples) w.f64s(s.values());
  }
  return w.finish();
}

Dataset decode_dataset(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "dataset");
  const DatasetHeader h = read_header(r);
  const std::uint64_t values = static_cast<std::uint64_t>(h.trajectories) * h.robots * 2 +
                               static_cast<std::uint64_t>(h.trajectories) * (h.horizon + 1) * h.robots * 4;
  if (r.remaining() != values * 8 + 4) {
    throw IoError(ErrorKind::kSizeMismatch,
                  "dataset: header declares " + std::to_string(values * 8 + 4) +
                      " payload bytes, file has " + std::to_string(r.remaining()));
  }
  verify_trailing_checksum(bytes, "dataset");
  if (h.trajectories == 0) throw IoError(ErrorKind::kEmptyDataset, "empty dataset");

  Dataset data;
  data.world = h.world;
  data.trajectories.resize(h.trajectories);
  for (Trajectory& t : data.trajectories) {
    t.world = h.world;
    t.world.goals.resize(h.robots);
    for (Vec2& g : t.world.goals) {
      g.x = r.f64();
      g.y = r.f64();
    }
  }
  for (Trajectory& t : data.trajectories) {
    t.samples.reserve(h.horizon + 1);
    for (std::size_t k = 0; k <= h.horizon; ++k) {
      std::vector<double> values(4 * h.robots);
      for (double& v : values) v = r.f64();
      t.samples.emplace_back(std::move(values));
    }
  }
  r.expect_checksum();
  try {
    data.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(ErrorKind::kInvalidContent, std::string("dataset: ") + e.what());
  }
  return data;
}

void write_dataset(const Dataset& data, const std::filesystem::path& path) {
  write_file_atomic(path, encode_dataset(data));
}

Dataset read_dataset(const std::filesystem::path& path) { return decode_dataset(read_file(path)); }

DatasetHeader read_dataset_header(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  ByteReader r(bytes, "dataset");
  return read_header(r);
}

// ---------------------------------------------------------------------------
// Checkpoint

std::vector<std::uint8_t> encode_checkpoint(const StoredCheckpoint& stored) {
  const Checkpoint& c = stored.checkpoint;
  const PolicyDescriptor& d = c.params.descriptor;
  if (c.adam.m.size() != c.params.theta.size() || c.adam.v.size() != c.params.theta.size()) {
    throw IoError(ErrorKind::kInvalidContent, "checkpoint: Adam moments do not match θ length");
  }
  ByteWriter w;
  w.magic(kCheckpointMagic);
  w.u16(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(d.embed_dim));
  w.u8(d.goal_features ? 1 : 0);
  for (const auto* layers : {&d.encoder, &d.decoder}) {
    w.u32(static_cast<std::uint32_t>(layers->size()));
    for (const LayerShape& l : *layers) {
      w.u32(static_cast<std::uint32_t>(l.in));
      w.u32(static_cast<std::uint32_t>(l.out));
    }
  }
  w.u64(c.params.theta.size());
  w.f64s(c.params.theta);
  w.f64(c.adam.hyper.lr);
  w.f64(c.adam.hyper.beta1);
  w.f64(c.adam.hyper.beta2);
  w.f64(c.adam.hyper.epsilon);
  w.u64(c.adam.step);
  w.f64s(c.adam.m);
  w.f64s(c.adam.v);
  w.u64(c.step);
  w.u32(c.config_hash);
  w.u32(stored.robots);
  return w.finish();
}

StoredCheckpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "checkpoint");
  r.expect_magic(kCheckpointMagic);
  check_version(r.u16(), kCheckpointVersion, "checkpoint");

  StoredCheckpoint stored;
  Checkpoint& c = stored.checkpoint;
  PolicyDescriptor& d = c.params.descriptor;
  d.embed_dim = r.u32();
  d.goal_features = r.u8() != 0;
  for (auto* layers : {&d.encoder, &d.decoder}) {
    const std::uint32_t count = r.u32();
    if (count > r.remaining() / 8) throw IoError(ErrorKind::kSizeMismatch, "checkpoint: truncated");
    layers->resize(count);
    for (LayerShape& l : *layers) {
      l.in = r.u32();
      l.out = r.u32();
    }
  }
  const std::uint64_t len = r.u64();
  // θ, m, v, four hyperparameters, adam step, train step, hash, robots, CRC.
  constexpr std::size_t kFixedTail = 4 * 8 + 8 + 8 + 4 + 4 + 4;
  if (len > r.remaining() / 24 || r.remaining() != 24 * len + kFixedTail) {
    throw IoError(ErrorKind::kSizeMismatch, "checkpoint: declared θ length " + std::to_string(len) +
                                                " does not match file size");
  }
  verify_trailing_checksum(bytes, "checkpoint");
  try {
    d.validate();
  } catch (const std::invalid_argument& e) {
    throw IoError(ErrorKind::kInvalidContent, std::string("checkpoint: ") + e.what());
  }
  if (len != d.parameter_count()) {
    throw IoError(ErrorKind::kInvalidContent, "checkpoint: θ length disagrees with descriptor");
  }
  auto read_vec = [&](std::vector<double>& out) {
    out.resize(len);
    for (double& v : out) v = r.f64();
  };
  read_vec(c.params.theta);
  c.adam.hyper.lr = r.f64();
  c.adam.hyper.beta1 = r.f64();
  c.adam.hyper.beta2 = r.f64();
  c.adam.hyper.epsilon = r.f64();
  c.adam.step = r.u64();
  read_vec(c.adam.m);
  read_vec(c.adam.v);
  c.step = r.u64();
  c.config_hash = r.u32();
  stored.robots = r.u32();
  r.expect_checksum();
  return stored;
}

void write_checkpoint(const StoredCheckpoint& ckpt, const std::filesystem::path& path) {
  write_file_atomic(path, encode_checkpoint(ckpt));
}

StoredCheckpoint read_checkpoint(const std::filesystem::path& path) {
  return decode_checkpoint(read_file(path));
}

// ---------------------------------------------------------------------------
// Files

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(ErrorKind::kOpen, "cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw IoError(ErrorKind::kOpen, "failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError(ErrorKind::kOpen, "cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(ErrorKind::kOpen, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string curve_csv(std::span<const CurvePoint> curve) {
  std::string out = "step,K_e,loss\n";
  for (const CurvePoint& p : curve) {
    out += std::to_string(p.step) + ',' + std::to_string(p.horizon) + ',' + format_double(p.loss) + '\n';
  }
  return out;
}

std::vector<CurvePoint> parse_curve_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "step,K_e,loss") {
    throw IoError(ErrorKind::kInvalidContent, "curve CSV: missing header 'step,K_e,loss'");
  }
  std::vector<CurvePoint> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    CurvePoint p;
    const char* first = line.data();
    const char* last = line.data() + line.size();
    auto fail = [&] {
      throw IoError(ErrorKind::kInvalidContent, "curve CSV: malformed line " + std::to_string(line_no));
    };
    auto r1 = std::from_chars(first, last, p.step);
    if (r1.ec != std::errc() || r1.ptr == last || *r1.ptr != ',') fail();
    auto r2 = std::from_chars(r1.ptr + 1, last, p.horizon);
    if (r2.ec != std::errc() || r2.ptr == last || *r2.ptr != ',') fail();
    auto r3 = std::from_chars(r2.ptr + 1, last, p.loss);
    if (r3.ec != std::errc() || r3.ptr != last) fail();
    out.push_back(p);
  }
  return out;
}

std::string metrics_csv(const MetricsReport& report) {
  std::string out = "traj_id,loss,epos,frechet,ncomp\n";
  auto row = [&](const std::string& id, const TrajectoryMetrics& m) {
    out += id + ',' + format_double(m.loss) + ',' + format_double(m.position_error) + ',' +
           format_double(m.frechet) + ',' + format_double(m.completed) + '\n';
  };
  for (std::size_t l = 0; l < report.per_trajectory.size(); ++l) row(std::to_string(l), report.per_trajectory[l]);
  row("mean", report.mean);
  return out;
}

}  // namespace swarmcl::io
