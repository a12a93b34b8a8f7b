#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmap/metrics.hpp"
#include "gmap/rasterizer.hpp"
#include "gmap/simulator.hpp"

namespace gmap {

// Schema or invariant violation in an input file.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kMapFormatVersion = 1;
inline constexpr const char* kLibraryVersion = "0.1.0";

// Map files: JSON with format_version, frame tag, elements and an optional
// ego pose (used by per-frame dumps).
VectorMap LoadMap(const std::string& path);
void SaveMap(const VectorMap& m, const std::string& path,
             const std::optional<Pose>& pose = std::nullopt);
// Pose recorded alongside a frame map, if any.
std::optional<Pose> LoadMapPose(const std::string& path);

ScenarioConfig LoadScenarioConfig(const std::string& path);
void SaveScenarioConfig(const ScenarioConfig& cfg, const std::string& path);

// Stable FNV-1a hash of the canonical config serialization; recorded in
// report metadata.
std::string ConfigHash(const ScenarioConfig& cfg);

void SaveReport(const EvalReport& report, const ScenarioConfig& cfg,
                const std::string& path);

TracedRegion LoadTracedRegion(const std::string& path);
void SaveTracedRegion(const TracedRegion& tr, const std::string& path);

// Plain-text mask grid: header lines (channel, rows, cols, resolution, tau,
// pose) followed by row-major decimal values.
void SaveMask(const BevMask& mask, const GridSpec& spec, double tau,
              const Pose& pose, const std::string& path);
BevMask LoadMask(const std::string& path);

// Deterministic SVG rendering; optional GT underlay in gray and traced
// region as a translucent fill.
void RenderSvg(const std::vector<const VectorMap*>& maps,
               const TracedRegion* traced, const std::string& path);

// Writes the full artifact bundle of a scenario run under out_dir.
void WriteArtifacts(const ScenarioArtifacts& art, const ScenarioConfig& cfg,
                    const std::string& out_dir);

}  // namespace gmap
