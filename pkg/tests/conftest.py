import pytest

from stochroute.solomon import (
    AugmentConfig,
    Customer,
    Depot,
    SolomonInstance,
    augment,
)


def build_instance(coords, demands, windows, capacity=200.0, depot=(0.0, 0.0),
                   depot_window=(0.0, 10_000.0), cfg=None, name="handmade"):
    """Handcrafted stochastic instance for targeted scenarios.

    coords/demands/windows are per-request lists; depot sits at ``depot``.
    """
    customers = tuple(
        Customer(id=i + 1, x=float(x), y=float(y), demand=float(q),
                 ready=float(e), due=float(h), service=0.0)
        for i, ((x, y), q, (e, h)) in enumerate(zip(coords, demands, windows))
    )
    base = SolomonInstance(
        name=name,
        vehicle_capacity=float(capacity),
        depot=Depot(x=float(depot[0]), y=float(depot[1]),
                    ready=float(depot_window[0]), due=float(depot_window[1])),
        customers=customers,
    )
    return augment(base, cfg or AugmentConfig())


@pytest.fixture
def deterministic_cfg():
    """Zero-variance augmentation: chance checks collapse to deterministic."""
    return AugmentConfig(travel_var_ratio=0.0, demand_var_ratio=0.0)


@pytest.fixture
def line_inst():
    """Two requests on a line at x=10 and x=20, zero variance, loose windows."""
    return build_instance(
        coords=[(10.0, 0.0), (20.0, 0.0)],
        demands=[10.0, 10.0],
        windows=[(0.0, 5_000.0), (0.0, 5_000.0)],
        cfg=AugmentConfig(travel_var_ratio=0.0, demand_var_ratio=0.0),
    )
