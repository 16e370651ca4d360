#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cbr/scene.hpp"

namespace cbr {

// On-disk layout:
//   root/images/NNNNNN.png
//   root/labels/NNNNNN.json   list of {class, center:[x,y,z], dims:[l,w,h], yaw}
//   root/calib/NNNNNN.json    {fx, fy, cx, cy, pitch, yaw, roll, position:[x,y,z]}
//   root/split.json           {count, train:[ids], val:[ids]}
struct DatasetSplit {
  std::vector<int> train;
  std::vector<int> val;
};

struct Dataset {
  std::vector<Frame> frames;  // ordered by id
  DatasetSplit split;

  const Frame& by_id(int id) const;
  std::vector<const Frame*> view(const std::vector<int>& ids) const;
};

std::string frame_name(int id);  // zero-padded, "000042"

// Interleaved split: every fifth frame (by position) goes to val when
// val_fraction is 0.2; deterministic in the frame list alone.
DatasetSplit make_split(const std::vector<Frame>& frames, double val_fraction);

void write_dataset(const std::vector<Frame>& frames, const DatasetSplit& split,
                   const std::filesystem::path& root);

// Throws std::runtime_error naming the offending frame id on missing or
// malformed files.
Dataset read_dataset(const std::filesystem::path& root);

// Calibration JSON helpers (bit-exact round-trip).
std::string calib_to_json(const CameraCalib& calib);
CameraCalib calib_from_json(const std::string& text);

std::string boxes_to_json(const std::vector<Box3D>& boxes);
std::vector<Box3D> boxes_from_json(const std::string& text);

}  // namespace cbr
