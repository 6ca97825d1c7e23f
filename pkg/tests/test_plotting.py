import numpy as np
import pytest

from phasestretch import plotting
from phasestretch.io import PNG_MAGIC

n = 64
k = np.arange(n)
sig = 0.5 + 0.2 * np.sin(2 * np.pi * k / n)

FIGURES = {
    "oracle": lambda p: plotting.oracle_figure(p, sig, sig - 0.5, sig - 0.49),
    "oracle_kernel": lambda p: plotting.oracle_figure(
        p, sig, sig, sig, u=np.fft.fftfreq(n), phase=np.fft.fftfreq(n) ** 2),
    "sweep": lambda p: plotting.sweep_figure(p, sig, np.cos(k / 5), np.abs(np.cos(k / 5))),
    "line_scan": lambda p: plotting.line_scan_figure(p, sig, sig, sig[::-1], row=3),
    "maps": lambda p: plotting.maps_figure(p, np.outer(sig, sig), {"pst": np.eye(n)}),
}


@pytest.mark.parametrize("name", sorted(FIGURES))
def test_writes_png(tmp_path, name):
    out = FIGURES[name](tmp_path / "f.png")
    data = out.read_bytes()
    assert data.startswith(PNG_MAGIC) and len(data) > 1000


@pytest.mark.parametrize("name", sorted(FIGURES))
def test_deterministic(tmp_path, name):
    a = FIGURES[name](tmp_path / "a.png").read_bytes()
    b = FIGURES[name](tmp_path / "b.png").read_bytes()
    assert a == b


def test_other_format(tmp_path):
    out = plotting.sweep_figure(tmp_path / "f.svg", sig, sig, sig)
    assert b"<svg" in out.read_bytes()
