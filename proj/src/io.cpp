#include "gprdet/io.hpp"

#include "binio.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gprdet {

namespace {

constexpr char kMagic[4] = {'G', 'P', 'R', 'V'};
constexpr std::uint16_t kVersion = 1;

}  // namespace

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open file for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string format_double(double x) {
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

void save_volume(const Volume& volume, const std::filesystem::path& path) {
  volume.validate();
  std::string out;
  out.reserve(42 + volume.size() * 4);
  binio::put_bytes(out, kMagic, 4);
  binio::put_u16(out, kVersion);
  binio::put_u32(out, static_cast<std::uint32_t>(volume.n_down));
  binio::put_u32(out, static_cast<std::uint32_t>(volume.n_cross));
  binio::put_u32(out, static_cast<std::uint32_t>(volume.n_time));
  binio::put_f64(out, volume.dx_down_m);
  binio::put_f64(out, volume.dx_cross_m);
  binio::put_f64(out, volume.dt_ns);
  for (double a : volume.data) binio::put_f32(out, static_cast<float>(a));
  atomic_write(path, out);
}

Volume load_volume(const std::filesystem::path& path) {
  const std::string buf = binio::read_file(path);
  binio::Reader r(buf, path.string());

  r.need(4, "magic");
  if (std::memcmp(buf.data(), kMagic, 4) != 0)
    throw Error(path.string() + ": bad magic (not a GPRV volume file)");
  binio::Reader body(buf, path.string());
  body.u32("magic");  // skip, checked above

  const std::uint16_t version = body.u16("version");
  if (version != kVersion)
    throw Error(path.string() + ": unsupported version " + std::to_string(version));

  Volume v;
  v.n_down = static_cast<int>(body.u32("n_down"));
  v.n_cross = static_cast<int>(body.u32("n_cross"));
  v.n_time = static_cast<int>(body.u32("n_time"));
  v.dx_down_m = body.f64("dx_down_m");
  v.dx_cross_m = body.f64("dx_cross_m");
  v.dt_ns = body.f64("dt_ns");
  if (v.n_down < 1 || v.n_cross < 1 || v.n_time < 1)
    throw Error(path.string() + ": dims must all be >= 1");
  auto check_spacing = [&](double x, const char* field) {
    if (!std::isfinite(x) || x <= 0.0)
      throw Error(path.string() + ": " + field + " must be finite and > 0");
  };
  check_spacing(v.dx_down_m, "dx_down_m");
  check_spacing(v.dx_cross_m, "dx_cross_m");
  check_spacing(v.dt_ns, "dt_ns");

  const std::size_t n = static_cast<std::size_t>(v.n_down) * v.n_cross * v.n_time;
  if (body.remaining() != n * 4)
    throw Error(path.string() + ": payload length mismatch: header declares " +
                std::to_string(n) + " samples, payload holds " +
                std::to_string(body.remaining() / 4));
  v.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) v.data[i] = body.f32("amplitudes");
  v.validate();
  return v;
}

void save_ground_truth_csv(const std::vector<GroundTruth>& truths,
                           const std::filesystem::path& path) {
  std::string out = "lane_id,object_id,down_m,cross_m,depth_m,is_threat\n";
  for (const auto& t : truths) {
    out += std::to_string(t.lane_id) + ',' + std::to_string(t.object_id) + ',' +
           format_double(t.down_m) + ',' + format_double(t.cross_m) + ',' +
           format_double(t.depth_m) + ',' + (t.is_threat ? '1' : '0') + '\n';
  }
  atomic_write(path, out);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::vector<GroundTruth> load_ground_truth_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": empty ground truth file");
  const std::string expect = "lane_id,object_id,down_m,cross_m,depth_m,is_threat";
  if (line != expect && line != expect + "\r")
    throw Error(path.string() + ": bad ground truth header: " + line);

  std::vector<GroundTruth> truths;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6)
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected 6 fields, got " +
                  std::to_string(f.size()));
    GroundTruth t;
    try {
      t.lane_id = std::stoi(f[0]);
      t.object_id = std::stoi(f[1]);
      t.down_m = std::stod(f[2]);
      t.cross_m = std::stod(f[3]);
      t.depth_m = std::stod(f[4]);
    } catch (const std::exception&) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": unparseable numeric field");
    }
    if (f[5] == "1")
      t.is_threat = true;
    else if (f[5] == "0")
      t.is_threat = false;
    else
      throw Error(path.string() + ":" + std::to_string(line_no) + ": is_threat must be 0 or 1");
    truths.push_back(t);
  }
  return truths;
}

void save_alarms_csv(const std::vector<Alarm>& alarms, const std::filesystem::path& path) {
  std::string out = "lane_id,down_m,cross_m,label,matched_object,confidence,fold\n";
  for (const auto& a : alarms) {
    out += std::to_string(a.lane_id) + ',' + format_double(a.down_m) + ',' +
           format_double(a.cross_m) + ',' +
           (a.label == AlarmLabel::Threat ? "Threat" : "NonThreat") + ',';
    if (a.matched_object) out += std::to_string(*a.matched_object);
    out += ',';
    if (a.confidence) out += format_double(*a.confidence);
    out += ',' + std::to_string(a.fold) + '\n';
  }
  atomic_write(path, out);
}

}  // namespace gprdet
