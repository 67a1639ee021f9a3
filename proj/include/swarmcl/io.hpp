#pragma once

// On-disk formats. All binary values are little-endian; every file ends with
// a CRC32 over the bytes between the 4-byte magic and the checksum.
//
// Dataset ("SWCL", version 1):
//   magic[4] version:u16 task:u8 n:u16 L:u32 K:u32 T:f64
//   arena_half_extent:f64 has_wall:u8 [wall y, gap_center, gap_half_width, thickness: f64 x4]
//   comm_radius:f64 u_max:f64
//   goals: L*n*2 f64
//   states: L*(K+1)*n*4 f64 (trajectory, time, robot, [px py vx vy])
//   crc32:u32
//
// Checkpoint ("SWCK", version 1):
//   magic[4] version:u16
//   embed_dim:u32 goal_features:u8 n_enc:u32 (in:u32 out:u32)*n_enc n_dec:u32 (in out)*n_dec
//   theta_len:u64 theta:f64*
//   lr beta1 beta2 epsilon:f64 adam_step:u64 m:f64*theta_len v:f64*theta_len
//   train_step:u64 config_hash:u32 robots:u32
//   crc32:u32

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmcl/experts.hpp"
#include "swarmcl/metrics.hpp"
#include "swarmcl/trainer.hpp"

namespace swarmcl::io {

inline constexpr std::uint16_t kDatasetVersion = 1;
inline constexpr std::uint16_t kCheckpointVersion = 1;

enum class ErrorKind {
  kOpen,
  kBadMagic,
  kBadVersion,
  kSizeMismatch,
  kChecksum,
  kEmptyDataset,
  kInvalidContent,
};

const char* to_string(ErrorKind kind);

class IoError : public std::runtime_error {
 public:
  IoError(ErrorKind kind, const std::string& what);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

std::vector<std::uint8_t> encode_dataset(const Dataset& data);
Dataset decode_dataset(std::span<const std::uint8_t> bytes);

void write_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

struct DatasetHeader {
  std::uint16_t version = 0;
  Task task = Task::kNavigation;
  std::size_t robots = 0;
  std::size_t trajectories = 0;
  std::size_t horizon = 0;
  double dt = 0.0;
  WorldSpec world;
};

DatasetHeader read_dataset_header(const std::filesystem::path& path);

// Robot count the policy was trained on is stored alongside the checkpoint.
struct StoredCheckpoint {
  Checkpoint checkpoint;
  std::uint32_t robots = 0;

  bool operator==(const StoredCheckpoint&) const = default;
};

std::vector<std::uint8_t> encode_checkpoint(const StoredCheckpoint& ckpt);
StoredCheckpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void write_checkpoint(const StoredCheckpoint& ckpt, const std::filesystem::path& path);
StoredCheckpoint read_checkpoint(const std::filesystem::path& path);

// Writes through a temporary sibling and renames, so a failed write never
// leaves a partial file at `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// Shortest round-trip decimal representation.
std::string format_double(double value);

// CSV: header `step,K_e,loss`.
std::string curve_csv(std::span<const CurvePoint> curve);
std::vector<CurvePoint> parse_curve_csv(const std::string& text);

// CSV: header `traj_id,loss,epos,frechet,ncomp`, one row per trajectory, then
// a row with traj_id `mean`.
std::string metrics_csv(const MetricsReport& report);

}  // namespace swarmcl::io
