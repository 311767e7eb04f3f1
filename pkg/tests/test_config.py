import numpy as np
import pytest

from soiltip.config import ConfigError, load_config, parse_config_text, parse_grid
from soiltip.forcing import ForcingKind
from soiltip.soil_model import SoilParams


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("")
    cfg = load_config(str(path))
    assert cfg.params == SoilParams()
    assert cfg.forcing == {} and cfg.tolerances == {}


def test_no_path_gives_defaults():
    assert load_config(None).params == SoilParams()


def test_override_and_comments():
    cfg = parse_config_text("# header\nTstar = 50   # cooler peak\n\nforcing_kind=SechPulse\nta_max=15\nr=12\nrel_tol=1e-9\n")
    assert cfg.params.Tstar == 50.0
    assert cfg.params.mu == SoilParams().mu
    f = cfg.build_forcing()
    assert f.kind is ForcingKind.SECH_PULSE and f.ta_max == 15.0 and f.r == 12.0
    assert cfg.integrator().rel_tol == 1e-9


def test_invalid_value_reports_line():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config_text("Tstar=70\nmu=-1\n")


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("bogus=1\n", "line 1: unknown key"),
        ("Tstar=70\nTstar=60\n", "duplicate"),
        ("Tstar\n", "expected key=value"),
        ("Tstar=warm\n", "expects a number"),
        ("forcing_kind=Square\n", "unknown forcing_kind"),
        ("r=nan\n", "finite"),
    ],
)
def test_malformed_lines(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config_text(text)


def test_missing_file():
    with pytest.raises(ConfigError):
        load_config("/nonexistent/run.cfg")


def test_forcing_kind_required():
    with pytest.raises(ConfigError):
        parse_config_text("r=1\n").build_forcing()


def test_output_dir_precedence(monkeypatch):
    cfg = parse_config_text("output_dir=from_file\n")
    monkeypatch.delenv("SOILTIP_OUTPUT_DIR", raising=False)
    assert cfg.resolve_output_dir() == "from_file"
    monkeypatch.setenv("SOILTIP_OUTPUT_DIR", "from_env")
    assert cfg.resolve_output_dir() == "from_env"
    assert cfg.resolve_output_dir("from_flag") == "from_flag"


def test_grids():
    np.testing.assert_allclose(parse_grid("0:1:5"), [0, 0.25, 0.5, 0.75, 1])
    g = parse_grid("log:0.01:1:3")
    np.testing.assert_allclose(g, [0.01, 0.1, 1.0])
    assert parse_grid("2:2:1").tolist() == [2.0]


@pytest.mark.parametrize("grid", ["1:0:3", "0:1", "a:1:3", "log:0:1:3", "0:1:0"])
def test_bad_grids(grid):
    with pytest.raises(ConfigError):
        parse_grid(grid)
