#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "gad/field.hpp"
#include "gad/labels.hpp"

namespace gad::io {

enum class RasterFormat { Pfm, Png, Pnm };

/// Detects the container from the file's magic bytes.
RasterFormat sniff_format(const std::filesystem::path& path);

/// Reads a PFM ("PF"/"Pf"), PNG or PGM/PPM raster. 8-bit and 16-bit integer
/// samples are scaled to [0,1] by value / maxval. Alpha channels are dropped.
MultiChannelField read_field(const std::filesystem::path& path);

/// Reads several rasters and stacks their channels in order. All inputs
/// must share height and width (ShapeError otherwise).
MultiChannelField read_stacked(std::span<const std::filesystem::path> paths);

/// Reads a single-channel 8-bit PNG/PGM whose pixel values are class ids.
LabelMap read_labels(const std::filesystem::path& path, int num_classes = 2,
                     int ignore_id = kDefaultIgnoreId);

/// Portable float map, little-endian, rows stored bottom-to-top. Supports 1
/// or 3 channels; values are narrowed to float32.
void write_pfm(const MultiChannelField& field, const std::filesystem::path& path);

/// 8-bit PNG (gray or RGB); values are clamped to [0,1] and scaled by 255.
void write_png(const MultiChannelField& field, const std::filesystem::path& path);

/// Single-channel 8-bit PNG of raw class ids.
void write_labels(const LabelMap& labels, const std::filesystem::path& path);

/// Dispatches on the extension: .pfm -> write_pfm, .png -> write_png.
void write_field(const MultiChannelField& field, const std::filesystem::path& path);

}  // namespace gad::io
