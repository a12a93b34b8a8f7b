#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gmap/builder.hpp"
#include "gmap/io.hpp"
#include "gmap/metrics.hpp"
#include "gmap/rasterizer.hpp"
#include "gmap/simulator.hpp"

namespace py = pybind11;
using namespace gmap;

PYBIND11_MODULE(pygmap, m) {
  m.doc() = "vectorized global HD map construction and evaluation";

  py::class_<Point2>(m, "Point2")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Point2::x)
      .def_readwrite("y", &Point2::y)
      .def("__repr__", [](const Point2& p) {
        return "Point2(" + std::to_string(p.x) + ", " + std::to_string(p.y) +
               ")";
      });

  py::class_<Polyline>(m, "Polyline")
      .def(py::init<>())
      .def(py::init([](const std::vector<std::pair<double, double>>& pts,
                       bool closed) {
             Polyline p;
             for (const auto& [x, y] : pts) p.points.push_back({x, y});
             p.closed = closed;
             return p;
           }),
           py::arg("points"), py::arg("closed") = false)
      .def_readwrite("points", &Polyline::points)
      .def_readwrite("closed", &Polyline::closed);

  py::class_<Pose>(m, "Pose")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"),
           py::arg("yaw"))
      .def_readwrite("x", &Pose::x)
      .def_readwrite("y", &Pose::y)
      .def_readwrite("yaw", &Pose::yaw);

  py::enum_<Category>(m, "Category")
      .value("ROAD_BOUNDARY", Category::kRoadBoundary)
      .value("LANE_DIVIDER", Category::kLaneDivider)
      .value("PED_CROSSING", Category::kPedCrossing);

  py::enum_<Frame>(m, "Frame")
      .value("EGO", Frame::kEgo)
      .value("GLOBAL", Frame::kGlobal);

  py::class_<MapElement>(m, "MapElement")
      .def(py::init<>())
      .def_readwrite("id", &MapElement::id)
      .def_readwrite("category", &MapElement::category)
      .def_readwrite("geometry", &MapElement::geometry)
      .def_readwrite("score", &MapElement::score);

  py::class_<VectorMap>(m, "VectorMap")
      .def(py::init<>())
      .def_readwrite("frame", &VectorMap::frame)
      .def_readwrite("elements", &VectorMap::elements);

  py::class_<ClipWindow>(m, "ClipWindow")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("length"), py::arg("width"))
      .def_readwrite("length", &ClipWindow::length)
      .def_readwrite("width", &ClipWindow::width);

  py::class_<ClipFragment>(m, "ClipFragment")
      .def_readonly("element", &ClipFragment::element)
      .def_readonly("parent_id", &ClipFragment::parent_id)
      .def_readonly("arc_offset", &ClipFragment::arc_offset);

  py::class_<Projection>(m, "Projection")
      .def_readonly("arc_length", &Projection::arc_length)
      .def_readonly("distance", &Projection::distance);

  // Geometry operations.
  m.def("polyline_length", &PolylineLength);
  m.def("resample_polyline", &ResamplePolyline, py::arg("polyline"),
        py::arg("n"));
  m.def("point_to_polyline_distance", &PointToPolylineDistance,
        py::arg("point"), py::arg("polyline"));
  m.def("project_point", &ProjectPoint, py::arg("point"), py::arg("polyline"));
  m.def("chamfer_distance", &ChamferDistance, py::arg("a"), py::arg("b"));
  m.def(
      "transform_polyline",
      [](const Polyline& p, const Pose& pose, bool ego_to_global) {
        return TransformPolyline(p, pose,
                                 ego_to_global
                                     ? TransformDirection::kEgoToGlobal
                                     : TransformDirection::kGlobalToEgo);
      },
      py::arg("polyline"), py::arg("pose"), py::arg("ego_to_global") = true);
  m.def("buffered_iou", &BufferedIou, py::arg("a"), py::arg("b"),
        py::arg("r"));

  // Map model.
  m.def("clip_map", &ClipMap, py::arg("map"), py::arg("pose"),
        py::arg("window"));
  m.def("fragments_to_local_map", &FragmentsToLocalMap);
  m.def("map_to_global", &MapToGlobal, py::arg("map"), py::arg("pose"));

  // Builder.
  py::class_<BuilderParams>(m, "BuilderParams")
      .def(py::init<>())
      .def_readwrite("match_distance", &BuilderParams::match_distance)
      .def_readwrite("nms_buffer", &BuilderParams::nms_buffer)
      .def_readwrite("nms_iou_threshold", &BuilderParams::nms_iou_threshold)
      .def_readwrite("window", &BuilderParams::window)
      .def_readwrite("min_splice_span", &BuilderParams::min_splice_span);

  py::class_<MatchResult>(m, "MatchResult")
      .def_readonly("pairs", &MatchResult::pairs)
      .def_readonly("unmatched_global", &MatchResult::unmatched_global)
      .def_readonly("unmatched_local", &MatchResult::unmatched_local);

  py::class_<GlobalMapState>(m, "GlobalMapState")
      .def(py::init<>())
      .def_readwrite("map", &GlobalMapState::map)
      .def_readwrite("next_id", &GlobalMapState::next_id);

  m.def("match_maps", &MatchMaps, py::arg("global_fragments"),
        py::arg("local"), py::arg("params"));
  m.def("inplace_replace", &InplaceReplace, py::arg("parent"),
        py::arg("fragment_offset"), py::arg("local_elem"), py::arg("params"));
  m.def("map_nms", &MapNms, py::arg("elements"), py::arg("params"));
  m.def("merge_step", &MergeStep, py::arg("state"), py::arg("local_pred"),
        py::arg("pose"), py::arg("params"));

  // Metrics.
  py::class_<CategoryResult>(m, "CategoryResult")
      .def_readonly("ap_per_threshold", &CategoryResult::ap_per_threshold)
      .def_readonly("mean_ap", &CategoryResult::mean_ap)
      .def_readonly("evaluated", &CategoryResult::evaluated);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("ap", &EvalReport::ap)
      .def_readonly("gap", &EvalReport::gap)
      .def_readonly("map_mean", &EvalReport::map_mean)
      .def_readonly("gap_mean", &EvalReport::gap_mean)
      .def_readonly("thresholds", &EvalReport::thresholds);

  m.def("ap_stream", &ApStream, py::arg("preds"), py::arg("gts"),
        py::arg("thresholds"));
  m.def("gap_map", &GapMap, py::arg("pred_global"), py::arg("gt_global"),
        py::arg("thresholds"));

  // Rasterizer.
  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("window", &GridSpec::window)
      .def_readwrite("resolution", &GridSpec::resolution)
      .def("rows", &GridSpec::Rows)
      .def("cols", &GridSpec::Cols);

  py::class_<BevMask>(m, "BevMask")
      .def_readonly("channel", &BevMask::channel)
      .def_readonly("rows", &BevMask::rows)
      .def_readonly("cols", &BevMask::cols)
      .def_readonly("values", &BevMask::values)
      .def("at", &BevMask::At, py::arg("row"), py::arg("col"));

  py::class_<TracedRegion>(m, "TracedRegion")
      .def(py::init<>())
      .def("contains", &TracedRegion::Contains)
      .def_readwrite("rectangles", &TracedRegion::rectangles);

  m.def("rasterize_soft", &RasterizeSoft, py::arg("elements"), py::arg("spec"),
        py::arg("tau"));
  m.def("update_traced_region", &UpdateTracedRegion, py::arg("traced"),
        py::arg("pose"), py::arg("window"));
  m.def("traced_mask", &TracedMask, py::arg("traced"), py::arg("ego_pose"),
        py::arg("spec"));
  m.def("clip_and_rasterize", &ClipAndRasterize, py::arg("global_map"),
        py::arg("traced"), py::arg("pose"), py::arg("spec"), py::arg("tau"));

  // Simulator.
  py::class_<WorldConfig>(m, "WorldConfig")
      .def(py::init<>())
      .def_readwrite("blocks_x", &WorldConfig::blocks_x)
      .def_readwrite("blocks_y", &WorldConfig::blocks_y)
      .def_readwrite("block_size", &WorldConfig::block_size)
      .def_readwrite("road_width", &WorldConfig::road_width)
      .def_readwrite("lanes_per_road", &WorldConfig::lanes_per_road)
      .def_readwrite("crossing_length", &WorldConfig::crossing_length)
      .def_readwrite("seed", &WorldConfig::seed);

  py::class_<NoiseConfig>(m, "NoiseConfig")
      .def(py::init<>())
      .def_readwrite("point_sigma", &NoiseConfig::point_sigma)
      .def_readwrite("pose_sigma_xy", &NoiseConfig::pose_sigma_xy)
      .def_readwrite("pose_sigma_yaw", &NoiseConfig::pose_sigma_yaw)
      .def_readwrite("drop_prob", &NoiseConfig::drop_prob)
      .def_readwrite("spurious_rate", &NoiseConfig::spurious_rate)
      .def_readwrite("score_scale", &NoiseConfig::score_scale);

  py::enum_<ScenarioMode>(m, "ScenarioMode")
      .value("SINGLE_SCENE", ScenarioMode::kSingleScene)
      .value("CROSS_SCENE", ScenarioMode::kCrossScene);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("world", &ScenarioConfig::world)
      .def_readwrite("noise", &ScenarioConfig::noise)
      .def_readwrite("window", &ScenarioConfig::window)
      .def_readwrite("frame_hz", &ScenarioConfig::frame_hz)
      .def_readwrite("update_every", &ScenarioConfig::update_every)
      .def_readwrite("n_frames", &ScenarioConfig::n_frames)
      .def_readwrite("builder", &ScenarioConfig::builder)
      .def_readwrite("eval_thresholds", &ScenarioConfig::eval_thresholds)
      .def_readwrite("mode", &ScenarioConfig::mode)
      .def_readwrite("seed", &ScenarioConfig::seed);

  py::class_<ScenarioArtifacts>(m, "ScenarioArtifacts")
      .def_readonly("gt_global", &ScenarioArtifacts::gt_global)
      .def_readonly("poses", &ScenarioArtifacts::poses)
      .def_readonly("frame_preds", &ScenarioArtifacts::frame_preds)
      .def_readonly("frame_gts", &ScenarioArtifacts::frame_gts)
      .def_readonly("state", &ScenarioArtifacts::state)
      .def_readonly("traced", &ScenarioArtifacts::traced)
      .def_readonly("report", &ScenarioArtifacts::report);

  m.def("generate_ground_truth", &GenerateGroundTruth, py::arg("config"));
  m.def("generate_trajectory", &GenerateTrajectory, py::arg("gt"),
        py::arg("config"));
  m.def("perceive", &Perceive, py::arg("gt"), py::arg("pose"),
        py::arg("window"), py::arg("noise"), py::arg("frame_seed"));
  m.def("run_scenario", &RunScenario, py::arg("config"),
        py::arg("initial") = std::nullopt);

  // File I/O.
  m.def("load_map", &LoadMap, py::arg("path"));
  m.def("save_map",
        [](const VectorMap& map, const std::string& path) {
          SaveMap(map, path);
        },
        py::arg("map"), py::arg("path"));
  m.def("load_scenario_config", &LoadScenarioConfig, py::arg("path"));
}
