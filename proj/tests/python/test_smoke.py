import math

import pygmap


def test_chamfer_and_resample():
    a = pygmap.Polyline([(0.0, 0.0), (10.0, 0.0)], False)
    b = pygmap.Polyline([(0.0, 1.0), (10.0, 1.0)], False)
    assert math.isclose(pygmap.chamfer_distance(a, b), 1.0, rel_tol=1e-6)
    r = pygmap.resample_polyline(a, 5)
    assert len(r.points) == 5
    assert math.isclose(r.points[2].x, 5.0, rel_tol=1e-9)


def test_merge_step_roundtrip():
    e = pygmap.MapElement()
    e.id = 0
    e.category = pygmap.Category.LANE_DIVIDER
    e.geometry = pygmap.Polyline([(0.0, 0.0), (10.0, 0.0)], False)
    e.score = 0.9
    local = pygmap.VectorMap()
    local.frame = pygmap.Frame.EGO
    local.elements = [e]

    state = pygmap.GlobalMapState()
    params = pygmap.BuilderParams()
    pose = pygmap.Pose(5.0, 2.0, 0.0)
    state = pygmap.merge_step(state, local, pose, params)
    assert len(state.map.elements) == 1
    assert state.map.elements[0].geometry.points[0].x == 5.0


def test_scenario_and_metrics():
    cfg = pygmap.ScenarioConfig()
    cfg.world.blocks_x = 1
    cfg.world.blocks_y = 1
    cfg.n_frames = 16
    art = pygmap.run_scenario(cfg)
    assert len(art.poses) == 16
    assert art.report.gap_mean is not None
    assert art.report.gap_mean > 0.8


def test_rasterize_values():
    e = pygmap.MapElement()
    e.id = 0
    e.category = pygmap.Category.ROAD_BOUNDARY
    e.geometry = pygmap.Polyline([(-3.0, 0.5), (3.0, 0.5)], False)
    e.score = 1.0
    spec = pygmap.GridSpec()
    spec.window = pygmap.ClipWindow(6.0, 6.0)
    spec.resolution = 1.0
    masks = pygmap.rasterize_soft([e], spec, 1.0)
    assert len(masks) == 3
    assert max(masks[0].values) > 0.999
