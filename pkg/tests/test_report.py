"""Figure rendering: files appear where promised and are real PNGs."""

from cogmesh.config import (
    LearningConfig,
    ScenarioConfig,
    SessionLengthConfig,
    SuConfig,
)
from cogmesh.engine import compare_learning, run
from cogmesh.qos import QosMeasurement
from cogmesh.report import render_comparison_figure, render_run_figures
from cogmesh.spectrum import Channel, PrimaryUser, QosSpread

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def small_scenario():
    mean = QosMeasurement(300.0, 250.0, 40.0, 0.5)
    return ScenarioConfig(
        channels=(
            Channel(id=0, band_id=0, qos_mean=mean,
                    qos_spread=QosSpread(120.0, 90.0, 25.0, 0.4)),
            Channel(id=1, band_id=1, qos_mean=mean),
        ),
        primary_users=(
            PrimaryUser(id=0, band_id=0, coop_prob=0.2),
            PrimaryUser(id=1, band_id=1, coop_prob=0.8),
        ),
        su=SuConfig(session_length=SessionLengthConfig(kind="fixed", seconds=30.0)),
        learning=LearningConfig(enabled=True),
        duration_s=300.0,
        seed=2,
    )


def test_run_figures_are_written(tmp_path):
    res = run(small_scenario(), seed=5)
    outdir = tmp_path / "figs"
    paths = render_run_figures(res.events, res.metrics, res.duration_s, outdir)
    assert sorted(p.name for p in paths) == ["mode_timeline.png", "offer_classes.png"]
    for p in paths:
        assert p.parent == outdir
        data = p.read_bytes()
        assert data.startswith(PNG_MAGIC)
        assert len(data) > 1000


def test_comparison_figure_is_written(tmp_path):
    cmp = compare_learning(small_scenario(), seeds=[2, 3])
    target = tmp_path / "nested" / "cmp.png"
    path = render_comparison_figure(cmp, target)
    assert path == target
    assert target.read_bytes().startswith(PNG_MAGIC)
