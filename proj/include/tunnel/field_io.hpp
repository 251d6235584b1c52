#pragma once

#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <string>

#include "tunnel/field.hpp"
#include "tunnel/observables.hpp"

namespace tunnel {

/// Raised on malformed or unreadable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary field dump: 32-byte header followed by interleaved little-endian
/// float64 (re, im) pairs.
///   bytes 0..7   magic "PSIDUMP1"
///   bytes 8..15  uint64 n_points
///   bytes 16..23 float64 box length L
///   bytes 24..31 float64 time stamp (dimensionless)
inline constexpr std::size_t kFieldDumpHeaderBytes = 32;

void write_field_dump(std::ostream& out, const Field& psi, double time = 0.0);
void write_field_dump(const std::filesystem::path& path, const Field& psi, double time = 0.0);

struct FieldDump {
  Field psi;
  double time = 0.0;
};
FieldDump read_field_dump(std::istream& in);
FieldDump read_field_dump(const std::filesystem::path& path);

/// CSV with header "K,density", ascending K.
void write_snapshot_csv(std::ostream& out, const MomentumSnapshot& snapshot);
nlohmann::json snapshot_sidecar(const MomentumSnapshot& snapshot);
/// Writes <stem>.csv and <stem>.json next to each other.
void write_snapshot(const std::filesystem::path& stem, const MomentumSnapshot& snapshot);

/// Checkpoint = field dump plus a JSON manifest (params, t, dt, schedule hash).
struct Checkpoint {
  Field psi;
  double time = 0.0;
  double dt = 0.0;
  nlohmann::json params;
  std::string schedule_hash;
};

std::string schedule_hash(const nlohmann::json& schedule);
void write_checkpoint(const std::filesystem::path& dir, const Checkpoint& cp);
Checkpoint read_checkpoint(const std::filesystem::path& dir);

}  // namespace tunnel
