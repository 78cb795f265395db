from quboplan.grid import GridMap
from quboplan.planner import Plan
from quboplan.render import PALETTE, render_svg


def test_grid_only_svg():
    g = GridMap(3, 4, frozenset({(1, 1)}))
    svg = render_svg(g)
    assert svg.startswith("<svg ")
    assert svg.rstrip().endswith("</svg>")
    assert svg.count("<rect") == 2  # background + one obstacle
    assert svg.count("<line") == (3 + 1) + (4 + 1)
    assert "<polyline" not in svg


def test_single_plan_polyline_and_markers():
    g = GridMap(2, 3)
    plan = Plan(0, [(0, (0, 0)), (1, (0, 1)), (2, (0, 2))], "reached_goal")
    svg = render_svg(g, [plan])
    assert svg.count("<polyline") == 1
    assert svg.count("<circle") == 1  # start marker
    assert PALETTE[0] in svg
    assert ">0<" in svg and ">2<" in svg  # step labels


def test_two_plans_two_colors():
    g = GridMap(2, 2)
    plans = [
        Plan(0, [(0, (0, 0)), (1, (0, 1))], "reached_goal"),
        Plan(1, [(0, (1, 1)), (1, (1, 0))], "reached_goal"),
    ]
    svg = render_svg(g, plans)
    assert PALETTE[0] in svg and PALETTE[1] in svg
    assert svg.count("<polyline") == 2


def test_render_deterministic_and_writes_file(tmp_path):
    g = GridMap(3, 3, frozenset({(0, 2), (2, 0)}))
    plan = Plan(0, [(0, (0, 0)), (1, (1, 0)), (2, (1, 1))], "reached_goal")
    first = render_svg(g, [plan])
    second = render_svg(g, [plan])
    assert first == second
    out = tmp_path / "plan.svg"
    render_svg(g, [plan], str(out))
    assert out.read_text() == first
