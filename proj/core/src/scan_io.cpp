#include "referee/scan_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <sstream>
#include <string>

#include "referee/errors.hpp"

namespace referee {

namespace {

constexpr char kMagic[4] = {'R', 'F', 'R', 'E'};
constexpr std::uint16_t kVersion = 1;

void put_bytes(std::ofstream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

template <typename T>
void put_le(std::ofstream& out, T value) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  put_bytes(out, buf, sizeof(T));
}

void put_f32_le(std::ofstream& out, float value) {
  std::uint32_t bits;
  std::memcpy(&bits, &value, sizeof(bits));
  put_le(out, bits);
}

void get_bytes(std::ifstream& in, void* data, std::size_t n, const char* what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw IoError(std::string("descriptor file truncated while reading ") + what);
}

template <typename T>
T get_le(std::ifstream& in, const char* what) {
  unsigned char buf[sizeof(T)];
  get_bytes(in, buf, sizeof(T), what);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

float get_f32_le(std::ifstream& in, const char* what) {
  const std::uint32_t bits = get_le<std::uint32_t>(in, what);
  float value;
  std::memcpy(&value, &bits, sizeof(value));
  return value;
}

std::optional<std::int64_t> scan_id_from_name(const std::string& name) {
  std::string stem = name;
  const auto dot = stem.rfind('.');
  if (dot == std::string::npos) return std::nullopt;
  const std::string ext = stem.substr(dot + 1);
  if (ext != "png" && ext != "pgm") return std::nullopt;
  stem = stem.substr(0, dot);
  if (stem.rfind("scan_", 0) != 0) return std::nullopt;
  const std::string digits = stem.substr(5);
  if (digits.empty()) return std::nullopt;
  std::int64_t id = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  return id;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& s, const char* what, const std::filesystem::path& path) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("poses.csv: bad " + std::string(what) + " value \"" + s + "\" in " +
                          path.string());
  }
}

}  // namespace

SessionPoses load_poses_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("poses.csv is empty: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::string plain = "scan_id,timestamp,x,y,yaw";
  const std::string with_odom = plain + ",odom_x,odom_y,odom_yaw";
  bool has_odom = false;
  if (line == with_odom)
    has_odom = true;
  else if (line != plain)
    throw ValidationError("poses.csv: header must be \"" + plain + "\" or \"" + with_odom +
                          "\", got \"" + line + "\"");

  SessionPoses poses;
  poses.has_odometry = has_odom;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::size_t expected = has_odom ? 8 : 5;
    if (fields.size() != expected)
      throw ValidationError("poses.csv: line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(expected));
    PoseRecord rec;
    const std::int64_t id =
        static_cast<std::int64_t>(parse_double(fields[0], "scan_id", path));
    rec.timestamp = parse_double(fields[1], "timestamp", path);
    rec.gt.x = parse_double(fields[2], "x", path);
    rec.gt.y = parse_double(fields[3], "y", path);
    rec.gt.yaw = wrap_angle(parse_double(fields[4], "yaw", path));
    if (has_odom) {
      Pose2 odom;
      odom.x = parse_double(fields[5], "odom_x", path);
      odom.y = parse_double(fields[6], "odom_y", path);
      odom.yaw = wrap_angle(parse_double(fields[7], "odom_yaw", path));
      rec.odom = odom;
    }
    if (!poses.by_id.emplace(id, rec).second)
      throw ValidationError("poses.csv: duplicate scan_id " + std::to_string(id));
  }
  if (poses.by_id.empty()) throw ValidationError("poses.csv has no data rows: " + path.string());
  return poses;
}

void save_poses_csv(const std::filesystem::path& path, const SessionPoses& poses) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "scan_id,timestamp,x,y,yaw";
  if (poses.has_odometry) out << ",odom_x,odom_y,odom_yaw";
  out << "\n";
  for (const auto& [id, rec] : poses.by_id) {
    out << id << ',' << rec.timestamp << ',' << rec.gt.x << ',' << rec.gt.y << ',' << rec.gt.yaw;
    if (poses.has_odometry) {
      if (!rec.odom)
        throw ValidationError("save_poses_csv: scan " + std::to_string(id) +
                              " is missing odometry");
      out << ',' << rec.odom->x << ',' << rec.odom->y << ',' << rec.odom->yaw;
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing " + path.string());
}

void save_scan_image(const std::filesystem::path& path, const RadarScan& scan) {
  cv::Mat img(static_cast<int>(scan.intensities.rows()), static_cast<int>(scan.intensities.cols()),
              CV_8UC1);
  for (int i = 0; i < img.rows; ++i) {
    for (int j = 0; j < img.cols; ++j) {
      const float v = std::clamp(scan.intensities(i, j), 0.0f, 1.0f);
      img.at<std::uint8_t>(i, j) = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
  }
  if (!cv::imwrite(path.string(), img)) throw IoError("cannot write image " + path.string());
}

Session load_session(const std::filesystem::path& dir, const PipelineConfig& config) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("session directory not found: " + dir.string());

  Session session;
  session.poses = load_poses_csv(dir / "poses.csv");

  std::vector<std::pair<std::int64_t, std::filesystem::path>> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (const auto id = scan_id_from_name(entry.path().filename().string()))
      files.emplace_back(*id, entry.path());
  }
  if (files.empty()) throw ValidationError("session has no scan images: " + dir.string());
  std::sort(files.begin(), files.end());

  session.scans.reserve(files.size());
  for (const auto& [id, path] : files) {
    const cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (img.empty()) throw IoError("cannot read image " + path.string());
    if (img.channels() != 1 || img.depth() != CV_8U)
      throw ValidationError("scan image must be 8-bit grayscale: " + path.string());
    RadarScan scan;
    scan.scan_id = id;
    scan.range_resolution = config.synth.range_resolution;
    scan.intensities.resize(img.rows, img.cols);
    for (int i = 0; i < img.rows; ++i)
      for (int j = 0; j < img.cols; ++j)
        scan.intensities(i, j) = static_cast<float>(img.at<std::uint8_t>(i, j)) / 255.0f;

    const auto pose_it = session.poses.by_id.find(id);
    if (pose_it == session.poses.by_id.end())
      throw ValidationError("poses.csv is missing scan_id " + std::to_string(id));
    scan.timestamp = pose_it->second.timestamp;

    if (!session.scans.empty()) {
      const RadarScan& first = session.scans.front();
      if (scan.azimuth_count() != first.azimuth_count() || scan.range_bins() != first.range_bins())
        throw ValidationError("scan " + std::to_string(id) + " has shape " +
                              std::to_string(scan.azimuth_count()) + "x" +
                              std::to_string(scan.range_bins()) + ", expected " +
                              std::to_string(first.azimuth_count()) + "x" +
                              std::to_string(first.range_bins()));
    }
    session.scans.push_back(std::move(scan));
  }
  if (session.scans.front().azimuth_count() < 4 || session.scans.front().range_bins() < 4)
    throw ValidationError("scans need at least 4 azimuths and 4 range bins");
  return session;
}

void save_descriptors(const std::vector<DescriptorRecord>& db, const std::filesystem::path& path) {
  Eigen::Index n_w = 0, n_h = 0;
  std::uint64_t hash = 0;
  if (!db.empty()) {
    n_w = db.front().r_referee.size();
    n_h = db.front().a_referee.size();
    hash = db.front().config_hash;
    for (const DescriptorRecord& rec : db) {
      if (rec.config_hash != hash)
        throw ValidationError("save_descriptors: records carry different config hashes");
      if (rec.r_referee.size() != n_w || rec.a_referee.size() != n_h)
        throw ValidationError("save_descriptors: records carry mixed descriptor lengths");
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  put_bytes(out, kMagic, sizeof(kMagic));
  put_le(out, kVersion);
  put_le(out, static_cast<std::uint32_t>(n_w));
  put_le(out, static_cast<std::uint32_t>(n_h));
  put_le(out, hash);
  put_le(out, static_cast<std::uint64_t>(db.size()));
  for (const DescriptorRecord& rec : db) {
    put_le(out, static_cast<std::uint64_t>(rec.scan_id));
    for (Eigen::Index k = 0; k < n_w; ++k) put_f32_le(out, rec.r_referee[k]);
    for (Eigen::Index k = 0; k < n_h; ++k) put_f32_le(out, rec.a_referee[k]);
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<DescriptorRecord> load_descriptors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  get_bytes(in, magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("not a descriptor file (bad magic): " + path.string());
  const auto version = get_le<std::uint16_t>(in, "version");
  if (version != kVersion)
    throw IoError("unsupported descriptor file version " + std::to_string(version));
  const auto n_w = static_cast<Eigen::Index>(get_le<std::uint32_t>(in, "N_w"));
  const auto n_h = static_cast<Eigen::Index>(get_le<std::uint32_t>(in, "N_h"));
  const auto hash = get_le<std::uint64_t>(in, "config_hash");
  const auto count = get_le<std::uint64_t>(in, "count");

  std::vector<DescriptorRecord> db;
  db.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    DescriptorRecord rec;
    rec.scan_id = static_cast<std::int64_t>(get_le<std::uint64_t>(in, "scan_id"));
    rec.config_hash = hash;
    rec.r_referee.resize(n_w);
    for (Eigen::Index k = 0; k < n_w; ++k) rec.r_referee[k] = get_f32_le(in, "r_referee");
    rec.a_referee.resize(n_h);
    for (Eigen::Index k = 0; k < n_h; ++k) rec.a_referee[k] = get_f32_le(in, "a_referee");
    db.push_back(std::move(rec));
  }
  char extra;
  if (in.read(&extra, 1) && in.gcount() == 1)
    throw IoError("descriptor file has trailing bytes: " + path.string());
  return db;
}

void save_trajectory_csv(const std::filesystem::path& path,
                         const std::vector<std::int64_t>& scan_ids,
                         const std::vector<Pose2>& poses) {
  if (scan_ids.size() != poses.size())
    throw ValidationError("save_trajectory_csv: id and pose counts differ");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "scan_id,x,y,yaw\n";
  for (std::size_t i = 0; i < poses.size(); ++i)
    out << scan_ids[i] << ',' << poses[i].x << ',' << poses[i].y << ',' << poses[i].yaw << "\n";
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace referee
