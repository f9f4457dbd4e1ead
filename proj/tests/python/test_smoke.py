import math

import pytest

import groupoid_limit as gl


def test_compose_and_inverse():
    h = gl.heisenberg()
    assert gl.compose(h, [], [1, 0, 0], [0, 1, 0]) == pytest.approx([1, 1, 0.5])
    assert gl.invert_element(h, [], [1, 2, 3]) == pytest.approx([-1, -2, -3])
    assert gl.source_coords(gl.pair(2), [0.1, 0.2], [0.3, -0.1]) == pytest.approx([0.4, 0.1])


def test_axioms():
    rep = gl.validate_axioms(gl.ax_plus_b(), 100, 7)
    assert rep["failures"] == []
    assert rep["associativity"] <= 1e-10


def test_structure_constants():
    grid = gl.Grid.symmetric(0, 0, 0, 3, 6, 16)
    d = gl.algebroid(gl.heisenberg(), grid)
    c = d["structures"][0]
    assert c[(0 * 3 + 1) * 3 + 2] == pytest.approx(1.0, abs=1e-5)
    assert c[(1 * 3 + 0) * 3 + 2] == pytest.approx(-1.0, abs=1e-5)


def test_bracket_antisymmetric():
    grid = gl.Grid.symmetric(1, 6, 32, 1, 6, 32)
    f = gl.Symbol.gaussian(1, 1)
    g = gl.Symbol.gaussian(1, 1).times_x(0)
    chart = gl.pair(1)
    a = gl.bracket(f, g, chart, grid)
    b = gl.bracket(g, f, chart, grid)
    scale = max(abs(z) for z in a)
    assert scale > 0
    assert max(abs(x + y) for x, y in zip(a, b)) <= 1e-12 * scale


def test_classical_limit_pair():
    grid = gl.Grid.symmetric(1, 6, 32, 1, 6, 32)
    f = gl.Symbol.gaussian(1, 1)
    g = gl.Symbol.gaussian(1, 1).times_x(0).times_xi(0)
    rows = gl.classical_limit(gl.pair(1), grid, f, g, [0.2, 0.1, 0.05])
    errs = [r["error"] for r in rows]
    assert errs[0] > errs[1] > errs[2]
    assert 0.35 <= rows[2]["ratio"] <= 0.65


def test_norm_curve_zero_symbol():
    grid = gl.Grid.symmetric(1, 6, 32, 1, 6, 32)
    nc = gl.norm_curve(gl.Symbol(1, 1), gl.pair(1), [0.2, 0.1], grid)
    assert nc["zero_norm"] == 0.0
    assert all(r["norm"] == 0.0 for r in nc["rows"])


def test_run_command_validate():
    cfg = {
        "chart": {"builtin": "pair", "n": 1},
        "grid": {"base": {"radius": 4, "intervals": 16}, "fiber": {"radius": 4, "intervals": 16}},
    }
    s = gl.run_command("validate", cfg)
    assert s["status"] == "pass"
    assert s["tool"] == "gcl"


def test_config_error():
    with pytest.raises(gl._core.ConfigError, match="t must be nonzero in sweep"):
        gl.run_command("deform", {
            "chart": {"builtin": "pair"},
            "grid": {"base": {"radius": 4, "intervals": 16}, "fiber": {"radius": 4, "intervals": 16}},
            "t": [0.1, 0.0],
        })
