import numpy as np
import pytest

from stochroute.datasets import (
    INSTANCE_NAMES,
    available,
    family_of,
    generate_instance,
    instance_path,
    load,
)


def test_all_twelve_present_and_parse():
    assert len(available()) == 12
    for name in available():
        inst = load(name)
        assert inst.n == 100
        assert inst.depot.ready == 0


def test_family_classification():
    assert family_of("C101") == "C1"
    assert family_of("rc202") == "RC2"
    assert family_of("R201") == "R2"


def test_shipped_files_match_generator():
    # the bundled files are exactly what the seeded generator emits
    for name in INSTANCE_NAMES:
        assert instance_path(name).read_text(encoding="utf-8") == generate_instance(name)


def test_headline_parameters():
    c101 = load("C101")
    assert c101.vehicle_capacity == 200
    assert c101.depot.due == 1236
    assert load("C201").vehicle_capacity == 700
    assert load("R201").vehicle_capacity == 1000
    assert load("RC101").vehicle_capacity == 200


def test_windows_well_formed():
    for name in INSTANCE_NAMES:
        inst = load(name)
        h0 = inst.depot.due
        for c in inst.customers:
            assert 0 <= c.ready < c.due <= h0


def test_type2_relaxes_windows():
    for fam in ("C", "R", "RC"):
        tight = load(f"{fam}101")
        relaxed = load(f"{fam}102")
        width = lambda inst: np.mean([c.due - c.ready for c in inst.customers])
        assert width(relaxed) > 1.5 * width(tight)


def test_clustered_family_is_tighter_packed():
    def mean_nn(inst):
        xy = np.array([(c.x, c.y) for c in inst.customers])
        d = np.hypot(xy[:, None, 0] - xy[None, :, 0], xy[:, None, 1] - xy[None, :, 1])
        np.fill_diagonal(d, np.inf)
        return d.min(axis=1).mean()

    assert mean_nn(load("C101")) < 0.7 * mean_nn(load("R101"))


def test_unknown_instance():
    with pytest.raises(FileNotFoundError):
        instance_path("C999")
    with pytest.raises(ValueError):
        generate_instance("X101")
