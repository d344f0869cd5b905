import pytest
from hypothesis import given, strategies as st

from fredgap.config import RunConfig, coerce, load_config_file, parse_config_text, resolve_config
from fredgap.errors import ConfigurationError


def test_defaults():
    cfg = RunConfig()
    assert cfg.threads == 1 and cfg.format == "csv" and cfg.order is None
    assert cfg.tolerance(1e-6) == 1e-6


def test_parse_config_text():
    text = """
    # comment line
    order = 32
    tol=1e-9   # trailing comment
    route = double_contour
    format = json
    deterministic = yes
    panels = default
    """
    assert parse_config_text(text) == {"order": 32, "tol": 1e-9, "route": "double_contour",
                                       "format": "json", "deterministic": True, "panels": None}


@pytest.mark.parametrize("text", ["order 32", "colour = red", "order = many", "deterministic = maybe"])
def test_parse_errors(text):
    with pytest.raises(ConfigurationError):
        parse_config_text(text)


def test_precedence_flags_over_file_over_defaults(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("order = 24\ntol = 1e-7\nthreads = 2\n")
    cfg = resolve_config({"order": 48, "tol": None}, path)
    assert cfg.order == 48      # flag wins
    assert cfg.tol == 1e-7      # file wins over default
    assert cfg.threads == 2
    assert cfg.format == "csv"  # default


def test_missing_file():
    with pytest.raises(ConfigurationError):
        load_config_file("/nonexistent/run.cfg")


@pytest.mark.parametrize("kw", [{"tol": 0.0}, {"tol": -1.0}, {"threads": 0}, {"order": 0},
                                {"format": "xml"}, {"route": "fft"}, {"truncation": float("inf")},
                                {"panels": 0}])
def test_invariants(kw):
    with pytest.raises(ConfigurationError):
        RunConfig(**kw)


@given(st.floats(1e-300, 1e3), st.integers(1, 64))
def test_roundtrip_through_text(tol, threads):
    cfg = resolve_config(parse_config_text(f"tol = {tol!r}\nthreads = {threads}"))
    assert cfg.tol == tol and cfg.threads == threads


def test_coerce_unknown_key():
    with pytest.raises(ConfigurationError):
        coerce("colour", "red")
