from pathlib import Path

import pytest

from boundstate.errors import ManifestError
from boundstate.manifest import load_manifest, parse_manifest

GOOD = """
# comment
[states]
g = catalog:gaussian
q = quartic
wide = exp(-x^2/8)
tagged = expr:1/(1+x^2)

[units]
hbar = 2
mass_factor = 0.5

[tolerances]
quad_tol = 1e-9

[solver]
x_min = -6
step = 0.01

[outputs]
dir = results
"""


def test_parses_every_section():
    m = parse_manifest(GOOD, Path("/data/run.ini"))
    assert [s.label for s in m.states] == ["g", "q", "wide", "tagged"]
    assert [s.kind for s in m.states] == ["catalog", "catalog", "expression", "expression"]
    assert m.states[3].source == "1/(1+x^2)"
    assert m.states[2].expression is not None
    assert (m.units.hbar, m.units.mass_factor) == (2.0, 0.5)
    assert m.quad_tol == 1e-9
    assert m.solver == {"x_min": -6.0, "step": 0.01}
    assert m.output_dir == Path("/data/results")


def test_defaults():
    m = parse_manifest("[states]\na = gaussian\n")
    assert m.quad_tol is None
    assert m.output_dir is None
    assert m.units.hbar == 1.0


def test_all_problems_reported_at_once():
    text = """[states]
a = exp(-x^2
a = catalog:nope
b c = x
[units]
hbar = -1
color = 3
[tolerances]
quad_tol = abc
[weird]
x = 1
"""
    with pytest.raises(ManifestError) as info:
        parse_manifest(text, Path("bad.ini"))
    problems = info.value.problems
    assert len(problems) == 8
    joined = "\n".join(problems)
    for fragment in ("bad.ini:2", "duplicate state label", "bad.ini:4", "hbar", "color", "not a number", "[weird]"):
        assert fragment in joined


def test_empty_manifest():
    with pytest.raises(ManifestError, match="no states"):
        parse_manifest("[units]\nhbar = 1\n")


@pytest.mark.parametrize("text", ["[states]\nnot a pair\n", "[states]\na = gaussian\n[units]\nhbar = 1\nhbar = 2\n", "a = gaussian\n"])
def test_structural_errors(text):
    with pytest.raises(ManifestError):
        parse_manifest(text)


def test_missing_file(tmp_path):
    with pytest.raises(ManifestError):
        load_manifest(tmp_path / "absent.ini")


def test_load_resolves_output_dir_next_to_file(tmp_path):
    f = tmp_path / "m.ini"
    f.write_text("[states]\ng = gaussian\n[outputs]\ndir = out\n")
    assert load_manifest(f).output_dir == tmp_path / "out"


def test_inline_comments():
    m = parse_manifest("[states]\ng = catalog:gaussian   # reference\n[units]\nhbar = 2 # override\n")
    assert m.states[0].source == "gaussian"
    assert m.units.hbar == 2.0
