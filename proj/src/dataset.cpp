#include "cbr/dataset.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace cbr {

using nlohmann::json;

namespace {

std::string read_text_file(const std::filesystem::path& path, const std::string& what) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(what + ": missing file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

const Frame& Dataset::by_id(int id) const {
  for (const Frame& f : frames) {
    if (f.id == id) return f;
  }
  throw std::out_of_range("Dataset: no frame with id " + std::to_string(id));
}

std::vector<const Frame*> Dataset::view(const std::vector<int>& ids) const {
  std::vector<const Frame*> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(&by_id(id));
  return out;
}

std::string frame_name(int id) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", id);
  return buf;
}

DatasetSplit make_split(const std::vector<Frame>& frames, double val_fraction) {
  DatasetSplit split;
  if (frames.empty()) return split;
  const int period = val_fraction <= 0.0
                         ? 0
                         : std::max(2, static_cast<int>(std::lround(1.0 / val_fraction)));
  for (size_t i = 0; i < frames.size(); ++i) {
    if (period > 0 && i % period == static_cast<size_t>(period - 1)) {
      split.val.push_back(frames[i].id);
    } else {
      split.train.push_back(frames[i].id);
    }
  }
  return split;
}

std::string calib_to_json(const CameraCalib& calib) {
  json j;
  j["fx"] = calib.fx;
  j["fy"] = calib.fy;
  j["cx"] = calib.cx;
  j["cy"] = calib.cy;
  j["pitch"] = calib.pitch;
  j["yaw"] = calib.yaw;
  j["roll"] = calib.roll;
  j["position"] = {calib.position.x(), calib.position.y(), calib.position.z()};
  return j.dump(2);
}

CameraCalib calib_from_json(const std::string& text) {
  const json j = json::parse(text);
  CameraCalib c;
  c.fx = j.at("fx").get<double>();
  c.fy = j.at("fy").get<double>();
  c.cx = j.at("cx").get<double>();
  c.cy = j.at("cy").get<double>();
  c.pitch = j.at("pitch").get<double>();
  c.yaw = j.at("yaw").get<double>();
  c.roll = j.at("roll").get<double>();
  const auto& p = j.at("position");
  c.position = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
  return c;
}

std::string boxes_to_json(const std::vector<Box3D>& boxes) {
  json arr = json::array();
  for (const Box3D& b : boxes) {
    json j;
    j["class"] = b.class_id;
    j["center"] = {b.center.x(), b.center.y(), b.center.z()};
    j["dims"] = {b.dims.x(), b.dims.y(), b.dims.z()};
    j["yaw"] = b.yaw;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

std::vector<Box3D> boxes_from_json(const std::string& text) {
  const json arr = json::parse(text);
  if (!arr.is_array()) throw std::runtime_error("label json: expected an array");
  std::vector<Box3D> boxes;
  boxes.reserve(arr.size());
  for (const auto& j : arr) {
    Box3D b;
    b.class_id = j.at("class").get<int>();
    const auto& c = j.at("center");
    b.center = {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};
    const auto& d = j.at("dims");
    b.dims = {d.at(0).get<double>(), d.at(1).get<double>(), d.at(2).get<double>()};
    b.yaw = j.at("yaw").get<double>();
    validate(b);
    boxes.push_back(b);
  }
  return boxes;
}

void write_dataset(const std::vector<Frame>& frames, const DatasetSplit& split,
                   const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  fs::create_directories(root / "images");
  fs::create_directories(root / "labels");
  fs::create_directories(root / "calib");

  for (const Frame& f : frames) {
    const std::string name = frame_name(f.id);
    write_png(root / "images" / (name + ".png"), f.image);
    write_text_file(root / "labels" / (name + ".json"), boxes_to_json(f.boxes));
    write_text_file(root / "calib" / (name + ".json"), calib_to_json(f.calib));
  }

  json manifest;
  manifest["count"] = frames.size();
  manifest["train"] = split.train;
  manifest["val"] = split.val;
  write_text_file(root / "split.json", manifest.dump(2));
}

Dataset read_dataset(const std::filesystem::path& root) {
  const json manifest = json::parse(read_text_file(root / "split.json", "dataset manifest"));
  Dataset ds;
  ds.split.train = manifest.at("train").get<std::vector<int>>();
  ds.split.val = manifest.at("val").get<std::vector<int>>();

  std::vector<int> ids = ds.split.train;
  ids.insert(ids.end(), ds.split.val.begin(), ds.split.val.end());
  std::sort(ids.begin(), ids.end());

  const size_t count = manifest.at("count").get<size_t>();
  if (ids.size() != count) {
    throw std::runtime_error("dataset manifest: count " + std::to_string(count) +
                             " does not match split size " + std::to_string(ids.size()));
  }

  ds.frames.reserve(ids.size());
  for (int id : ids) {
    const std::string name = frame_name(id);
    Frame f;
    f.id = id;
    try {
      f.image = read_png(root / "images" / (name + ".png"));
      f.boxes = boxes_from_json(read_text_file(root / "labels" / (name + ".json"), "labels"));
      f.calib = calib_from_json(read_text_file(root / "calib" / (name + ".json"), "calib"));
    } catch (const std::exception& e) {
      throw std::runtime_error("frame " + name + ": " + e.what());
    }
    ds.frames.push_back(std::move(f));
  }
  return ds;
}

}  // namespace cbr
