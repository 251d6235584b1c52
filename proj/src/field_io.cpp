#include "tunnel/field_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tunnel {

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

namespace {
constexpr std::array<char, 8> kMagic{'P', 'S', 'I', 'D', 'U', 'M', 'P', '1'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("truncated field dump");
  return value;
}
}  // namespace

void write_field_dump(std::ostream& out, const Field& psi, double time) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint64_t>(out, psi.size());
  put<double>(out, psi.grid().length());
  put<double>(out, time);
  for (const auto& a : psi.amplitudes()) {
    put<double>(out, a.real());
    put<double>(out, a.imag());
  }
  if (!out) throw IoError("failed writing field dump");
}

void write_field_dump(const std::filesystem::path& path, const Field& psi, double time) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_field_dump(out, psi, time);
}

FieldDump read_field_dump(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw IoError("not a field dump (bad magic)");
  const auto n = get<std::uint64_t>(in);
  const auto length = get<double>(in);
  const auto time = get<double>(in);
  std::vector<Complex> amps(n);
  for (auto& a : amps) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    a = Complex(re, im);
  }
  return FieldDump{Field(Grid(n, length), std::move(amps)), time};
}

FieldDump read_field_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_field_dump(in);
}

void write_snapshot_csv(std::ostream& out, const MomentumSnapshot& snapshot) {
  out << "K,density\n" << std::setprecision(17);
  for (std::size_t i = 0; i < snapshot.k.size(); ++i) out << snapshot.k[i] << ',' << snapshot.density[i] << '\n';
}

nlohmann::json snapshot_sidecar(const MomentumSnapshot& snapshot) {
  nlohmann::json j;
  j["hold_time"] = snapshot.hold_time;
  nlohmann::json pops = nlohmann::json::object();
  for (int n = -OrderPopulations::kMaxOrder; n <= OrderPopulations::kMaxOrder; ++n)
    pops[std::to_string(n)] = snapshot.populations(n);
  j["populations"] = pops;
  j["peak_fits"] = nlohmann::json::array();
  for (const auto& f : snapshot.peak_fits)
    j["peak_fits"].push_back({{"order", f.order}, {"center", f.center}, {"width", f.width}, {"amplitude", f.amplitude}});
  return j;
}

void write_snapshot(const std::filesystem::path& stem, const MomentumSnapshot& snapshot) {
  auto csv_path = stem;
  csv_path += ".csv";
  std::ofstream csv(csv_path);
  if (!csv) throw IoError("cannot open " + csv_path.string());
  write_snapshot_csv(csv, snapshot);
  auto json_path = stem;
  json_path += ".json";
  std::ofstream js(json_path);
  if (!js) throw IoError("cannot open " + json_path.string());
  js << snapshot_sidecar(snapshot).dump(2) << '\n';
}

std::string schedule_hash(const nlohmann::json& schedule) {
  // FNV-1a over the canonical (sorted-key) dump.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : schedule.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void write_checkpoint(const std::filesystem::path& dir, const Checkpoint& cp) {
  std::filesystem::create_directories(dir);
  write_field_dump(dir / "field.bin", cp.psi, cp.time);
  nlohmann::json manifest{{"params", cp.params}, {"t", cp.time}, {"dt", cp.dt}, {"schedule_hash", cp.schedule_hash},
                          {"field", "field.bin"}};
  std::ofstream out(dir / "checkpoint.json");
  if (!out) throw IoError("cannot write checkpoint manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

Checkpoint read_checkpoint(const std::filesystem::path& dir) {
  std::ifstream in(dir / "checkpoint.json");
  if (!in) throw IoError("missing checkpoint manifest in " + dir.string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad checkpoint manifest: ") + e.what());
  }
  auto dump = read_field_dump(dir / manifest.value("field", std::string("field.bin")));
  Checkpoint cp{std::move(dump.psi)};
  cp.time = manifest.at("t").get<double>();
  cp.dt = manifest.at("dt").get<double>();
  cp.params = manifest.at("params");
  cp.schedule_hash = manifest.at("schedule_hash").get<std::string>();
  if (std::abs(cp.time - dump.time) > 0.0) throw IoError("checkpoint manifest time does not match field dump");
  return cp;
}

}  // namespace tunnel
