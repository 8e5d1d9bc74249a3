#include "scenepred/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <system_error>

#include "scenepred/errors.hpp"

namespace scenepred {
namespace fs = std::filesystem;
namespace {

// Cursor over a Netpbm-style header: whitespace separated tokens with '#'
// comments running to end of line.
class HeaderReader {
 public:
  HeaderReader(const std::string& bytes, std::string origin)
      : bytes_(bytes), origin_(std::move(origin)) {}

  std::string token() {
    skip_space();
    const std::size_t begin = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (begin == pos_) fail("truncated header");
    return bytes_.substr(begin, pos_ - begin);
  }

  long integer() {
    const std::string t = token();
    try {
      std::size_t used = 0;
      const long v = std::stol(t, &used);
      if (used != t.size()) fail("bad number '" + t + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("bad number '" + t + "'");
    }
    return 0;
  }

  /// Consumes the single whitespace byte that ends the header.
  std::size_t end_of_header() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      fail("header not terminated");
    return pos_ + 1;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(origin_ + ": " + what);
  }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

unsigned char quantize(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<unsigned char>(std::lround(c * 255.0));
}

void check_dims(HeaderReader& h, long w, long h_) {
  if (w < 1 || h_ < 1 || w > 1 << 16 || h_ > 1 << 16) h.fail("unsupported raster size");
}

}  // namespace

std::string encode_ppm(const Frame& frame) {
  std::string out = "P6\n" + std::to_string(frame.width()) + " " +
                    std::to_string(frame.height()) + "\n255\n";
  out.reserve(out.size() + frame.size() * 3);
  for (const Rgb& px : frame.data())
    for (double c : px) out.push_back(static_cast<char>(quantize(c)));
  return out;
}

std::string encode_pgm(const LabelMap& labels) {
  std::string out = "P5\n" + std::to_string(labels.width()) + " " +
                    std::to_string(labels.height()) + "\n255\n";
  out.reserve(out.size() + labels.size());
  for (int v : labels.data()) {
    if (v < 0 || v > 255) throw std::invalid_argument("label outside 0..255 cannot be stored as PGM");
    out.push_back(static_cast<char>(static_cast<unsigned char>(v)));
  }
  return out;
}

std::string encode_pfm(const Grid<double>& values) {
  std::string out = "Pf\n" + std::to_string(values.width()) + " " +
                    std::to_string(values.height()) + "\n-1.0\n";
  out.reserve(out.size() + values.size() * 4);
  for (int row = values.height() - 1; row >= 0; --row)
    for (int col = 0; col < values.width(); ++col) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(values(col, row)));
      for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
    }
  return out;
}

Frame decode_ppm(const std::string& bytes, const std::string& origin) {
  HeaderReader h(bytes, origin);
  if (h.token() != "P6") h.fail("not a binary PPM (P6)");
  const long w = h.integer();
  const long ht = h.integer();
  check_dims(h, w, ht);
  if (h.integer() != 255) h.fail("only maxval 255 is supported");
  const std::size_t start = h.end_of_header();
  const std::size_t n = static_cast<std::size_t>(w * ht);
  if (bytes.size() < start + 3 * n) h.fail("truncated pixel data");
  Frame frame(static_cast<int>(w), static_cast<int>(ht));
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t c = 0; c < 3; ++c)
      frame[p][c] = static_cast<unsigned char>(bytes[start + 3 * p + c]) / 255.0;
  return frame;
}

LabelMap decode_pgm(const std::string& bytes, const std::string& origin) {
  HeaderReader h(bytes, origin);
  if (h.token() != "P5") h.fail("not a binary PGM (P5)");
  const long w = h.integer();
  const long ht = h.integer();
  check_dims(h, w, ht);
  const long maxval = h.integer();
  if (maxval < 1 || maxval > 255) h.fail("only 8-bit PGM is supported");
  const std::size_t start = h.end_of_header();
  const std::size_t n = static_cast<std::size_t>(w * ht);
  if (bytes.size() < start + n) h.fail("truncated pixel data");
  LabelMap labels(static_cast<int>(w), static_cast<int>(ht));
  for (std::size_t p = 0; p < n; ++p) labels[p] = static_cast<unsigned char>(bytes[start + p]);
  return labels;
}

Grid<double> decode_pfm(const std::string& bytes, const std::string& origin) {
  HeaderReader h(bytes, origin);
  if (h.token() != "Pf") h.fail("not a grayscale PFM (Pf)");
  const long w = h.integer();
  const long ht = h.integer();
  check_dims(h, w, ht);
  double scale = 0.0;
  try {
    scale = std::stod(h.token());
  } catch (const std::logic_error&) {
    h.fail("bad scale field");
  }
  if (scale == 0.0 || !std::isfinite(scale)) h.fail("bad scale field");
  const bool little = scale < 0.0;
  const std::size_t start = h.end_of_header();
  const std::size_t n = static_cast<std::size_t>(w * ht);
  if (bytes.size() < start + 4 * n) h.fail("truncated pixel data");
  Grid<double> grid(static_cast<int>(w), static_cast<int>(ht));
  std::size_t offset = start;
  for (long row = ht - 1; row >= 0; --row)
    for (long col = 0; col < w; ++col) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        const auto byte = static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[offset + b]));
        bits |= little ? byte << (8 * b) : byte << (8 * (3 - b));
      }
      offset += 4;
      grid(static_cast<int>(col), static_cast<int>(row)) = std::bit_cast<float>(bits);
    }
  return grid;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("cannot write " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " into place");
  }
}

Frame read_ppm(const fs::path& path) { return decode_ppm(read_file(path), path.string()); }
LabelMap read_pgm(const fs::path& path) { return decode_pgm(read_file(path), path.string()); }
Grid<double> read_pfm(const fs::path& path) { return decode_pfm(read_file(path), path.string()); }

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json to_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw IoError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json to_json(const ObjectState& s) {
  std::vector<double> id(s.identity.data(), s.identity.data() + s.identity.size());
  return {{"location", to_json(s.location)}, {"pose", s.pose.probs}, {"identity", id}};
}

ObjectState object_state_from_json(const nlohmann::json& j) {
  try {
    ObjectState s;
    s.location = vec3_from_json(j.at("location"));
    s.pose.probs = j.at("pose").get<std::vector<double>>();
    const auto id = j.at("identity").get<std::vector<double>>();
    if (id.size() != static_cast<std::size_t>(kIdentityDims))
      throw IoError("identity code must have " + std::to_string(kIdentityDims) + " entries");
    for (int d = 0; d < kIdentityDims; ++d) s.identity[d] = id[static_cast<std::size_t>(d)];
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("object state: ") + e.what());
  }
}

void save_triplet(const fs::path& dir, const Triplet& triplet, const Config& config) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  nlohmann::json meta;
  meta["format_version"] = kFormatVersion;
  meta["tool_version"] = kToolVersion;
  meta["seed"] = config.seed;
  meta["scene_index"] = triplet.scene_index;
  meta["scene_seed"] = triplet.scene_seed;
  meta["stride"] = triplet.stride;
  meta["frame_indices"] = triplet.frame_indices;
  meta["intrinsics"] = {{"width", triplet.camera.width},
                        {"height", triplet.camera.height},
                        {"focal", triplet.camera.focal}};
  meta["conventions"] = {{"axes", "x right, y forward (optical axis), z up"},
                         {"pixels", "i right, j up, origin at the image center"},
                         {"depth", "Euclidean distance to the camera center"},
                         {"yaw", "counter-clockwise seen from above, radians"}};
  meta["ego"] = nlohmann::json::array();
  for (const auto& e : triplet.ego)
    meta["ego"].push_back({{"velocity", to_json(e.velocity)}, {"yaw_rate", e.yaw_rate}});
  meta["objects"] = nlohmann::json::array();
  for (const auto& frame_truth : triplet.truth) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : frame_truth)
      arr.push_back({{"id", t.id},
                     {"shape", shape_name(t.shape)},
                     {"half_size", t.half_size},
                     {"location", to_json(t.location)},
                     {"pose", t.pose},
                     {"velocity", to_json(t.velocity)},
                     {"yaw_rate", t.yaw_rate}});
    meta["objects"].push_back(arr);
  }
  meta["config"] = config.to_json();

  for (std::size_t m = 0; m < 3; ++m) {
    const std::string n = std::to_string(m);
    const auto& f = triplet.frames[m];
    write_file_atomic(dir / ("frame" + n + ".ppm"), encode_ppm(f.image));
    write_file_atomic(dir / ("depth" + n + ".pfm"), encode_pfm(f.depth));
    write_file_atomic(dir / ("labels" + n + ".pgm"), encode_pgm(f.labels));
  }
  write_file_atomic(dir / "meta.json", dump_json(meta));
}

StoredTriplet load_triplet(const fs::path& dir) {
  StoredTriplet stored;
  stored.directory = dir;
  const nlohmann::json meta = read_json(dir / "meta.json");
  Triplet& t = stored.triplet;
  try {
    stored.config = Config::from_json(meta.at("config"));
    t.scene_index = meta.at("scene_index").get<int>();
    t.scene_seed = meta.at("scene_seed").get<std::uint64_t>();
    t.stride = meta.at("stride").get<int>();
    t.frame_indices = meta.at("frame_indices").get<std::array<int, 3>>();
    const auto& in = meta.at("intrinsics");
    t.camera = {in.at("width").get<int>(), in.at("height").get<int>(), in.at("focal").get<double>()};
    const auto& ego = meta.at("ego");
    if (!ego.is_array() || ego.size() != 2) throw IoError("meta.json: ego must hold two entries");
    for (std::size_t e = 0; e < 2; ++e)
      t.ego[e] = {vec3_from_json(ego[e].at("velocity")), ego[e].at("yaw_rate").get<double>()};
    const auto& objects = meta.at("objects");
    if (!objects.is_array() || objects.size() != 3)
      throw IoError("meta.json: objects must hold three frames");
    for (std::size_t m = 0; m < 3; ++m)
      for (const auto& o : objects[m]) {
        TruthObject truth;
        truth.id = o.at("id").get<int>();
        truth.shape = o.at("shape").get<std::string>() == "box" ? Shape::box : Shape::sphere;
        truth.half_size = o.at("half_size").get<double>();
        truth.location = vec3_from_json(o.at("location"));
        truth.pose = o.at("pose").get<double>();
        truth.velocity = vec3_from_json(o.at("velocity"));
        truth.yaw_rate = o.at("yaw_rate").get<double>();
        t.truth[m].push_back(truth);
      }
  } catch (const nlohmann::json::exception& e) {
    throw IoError((dir / "meta.json").string() + ": " + e.what());
  }
  t.camera.validate();
  for (std::size_t m = 0; m < 3; ++m) {
    const std::string n = std::to_string(m);
    auto& f = t.frames[m];
    f.image = read_ppm(dir / ("frame" + n + ".ppm"));
    f.depth = read_pfm(dir / ("depth" + n + ".pfm"));
    f.labels = read_pgm(dir / ("labels" + n + ".pgm"));
    if (f.image.width() != t.camera.width || f.image.height() != t.camera.height ||
        !f.depth.same_shape(f.image) || !f.labels.same_shape(f.image))
      throw IoError(dir.string() + ": frame " + n + " rasters disagree with the intrinsics");
  }
  return stored;
}

std::vector<fs::path> list_triplets(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("dataset directory " + root.string() + " not found");
  std::vector<fs::path> out;
  for (const auto& scene : fs::directory_iterator(root, ec)) {
    if (!scene.is_directory() || scene.path().filename().string().rfind("scene_", 0) != 0) continue;
    for (const auto& trip : fs::directory_iterator(scene.path())) {
      if (trip.is_directory() && trip.path().filename().string().rfind("triplet_", 0) == 0 &&
          fs::exists(trip.path() / "meta.json"))
        out.push_back(trip.path());
    }
  }
  if (ec) throw IoError("cannot list " + root.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace scenepred
