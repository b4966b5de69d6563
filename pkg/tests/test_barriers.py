"""Barrier registry semantics: versioning, immutability, validation."""
import numpy as np
import pytest

from barriersim.barriers import (
    DIM_MAX,
    DIM_MIN,
    PERSON_ID,
    BarrierRegistry,
    PersonState,
    WorldSnapshot,
)
from barriersim.errors import (
    InvalidDimensions,
    PersonBarrierImmutable,
    UnknownBarrier,
)
from barriersim.geometry import Pose
from barriersim.shapes import OrientedBox, Sphere, VerticalCylinder


@pytest.fixture
def reg():
    return BarrierRegistry()


def test_person_exists_at_version_zero(reg):
    snap = reg.snapshot()
    assert snap.version == 0
    person = snap.barrier(PERSON_ID)
    assert person.kind == "person"
    assert isinstance(person.shape, VerticalCylinder)
    assert person.shape.radius == pytest.approx(0.4)
    assert person.shape.height == pytest.approx(2.0)
    assert person.shape.z0 == 0.0


def test_spawn_assigns_sequential_ids(reg):
    a = reg.spawn_obstacle(Sphere([1, 0, 0.5], 0.2))
    b = reg.spawn_obstacle(OrientedBox(Pose.identity(), [0.1, 0.1, 0.1]))
    assert (a, b) == ("obs-1", "obs-2")
    assert reg.snapshot().version == 2


def test_spawn_rejects_out_of_range_dims(reg):
    with pytest.raises(InvalidDimensions):
        reg.spawn_obstacle(Sphere([0, 0, 0], DIM_MIN / 2))
    with pytest.raises(InvalidDimensions):
        reg.spawn_obstacle(Sphere([0, 0, 0], DIM_MAX * 1.5))
    with pytest.raises(InvalidDimensions):
        reg.spawn_obstacle(OrientedBox(Pose.identity(), [0.5, DIM_MAX * 1.5, 0.5]))
    # each dimension value (radius, half-extent) is checked against the clamp
    reg.spawn_obstacle(OrientedBox(Pose.identity(), [DIM_MAX, DIM_MIN, 0.1]))
    assert reg.snapshot().version == 1


def test_spawn_rejects_person_cylinder_kind(reg):
    with pytest.raises(InvalidDimensions):
        reg.spawn_obstacle(VerticalCylinder([0, 0], 0.0, 1.0, 0.3))


def test_snapshot_is_immutable_record(reg):
    before = reg.snapshot()
    reg.spawn_obstacle(Sphere([1, 0, 0.5], 0.2))
    assert before.version == 0
    assert len(before.barriers) == 1
    after = reg.snapshot()
    assert after.version == 1 and len(after.barriers) == 2


def test_transform_sphere_moves_and_scales(reg):
    bid = reg.spawn_obstacle(Sphere([1, 0, 0.5], 0.2))
    v0 = reg.snapshot().version
    reg.transform_barrier(bid, Pose(np.array([0.0, 1.0, 0.25]), None), np.array([2.0, 2.0, 2.0]))
    snap = reg.snapshot()
    assert snap.version == v0 + 1
    s = snap.barrier(bid).shape
    assert np.allclose(s.center, [0.0, 1.0, 0.25])
    assert s.radius == pytest.approx(0.4)


def test_transform_box_scale_per_axis(reg):
    bid = reg.spawn_obstacle(OrientedBox(Pose.identity(), [0.1, 0.2, 0.3]))
    reg.transform_barrier(bid, Pose.identity(), np.array([2.0, 1.0, 0.5]))
    s = reg.snapshot().barrier(bid).shape
    assert np.allclose(s.half_extents, [0.2, 0.2, 0.15])


def test_transform_validation_is_atomic(reg):
    bid = reg.spawn_obstacle(Sphere([1, 0, 0.5], 0.2))
    v0 = reg.snapshot().version
    with pytest.raises(InvalidDimensions):
        reg.transform_barrier(bid, Pose.identity(), np.array([100.0, 1.0, 1.0]))
    snap = reg.snapshot()
    assert snap.version == v0
    assert snap.barrier(bid).shape.radius == pytest.approx(0.2)


def test_transform_unknown_id(reg):
    with pytest.raises(UnknownBarrier):
        reg.transform_barrier("obs-99", Pose.identity(), np.ones(3))


def test_person_cannot_be_transformed_or_deleted(reg):
    with pytest.raises(PersonBarrierImmutable):
        reg.transform_barrier(PERSON_ID, Pose.identity(), np.ones(3))
    with pytest.raises(PersonBarrierImmutable):
        reg.delete_barrier(PERSON_ID)


def test_delete_removes_and_bumps_version(reg):
    bid = reg.spawn_obstacle(Sphere([1, 0, 0.5], 0.2))
    v0 = reg.snapshot().version
    reg.delete_barrier(bid)
    snap = reg.snapshot()
    assert snap.version == v0 + 1
    assert snap.barrier(bid) is None
    with pytest.raises(UnknownBarrier):
        reg.get(bid)


def test_delete_unknown_id(reg):
    with pytest.raises(UnknownBarrier):
        reg.delete_barrier("obs-5")


def test_update_person_moves_cylinder(reg):
    moved = reg.update_person(PersonState([1.5, -0.7, 1.65]))
    assert moved
    snap = reg.snapshot()
    assert snap.version == 1
    shape = snap.barrier(PERSON_ID).shape
    assert np.allclose(shape.center_xy, [1.5, -0.7])
    assert shape.z0 == 0.0  # stays grounded regardless of head height


def test_update_person_dedupes_tiny_motion(reg):
    reg.update_person(PersonState([1.0, 1.0, 1.7]))
    v = reg.snapshot().version
    assert not reg.update_person(PersonState([1.0 + 1e-9, 1.0, 1.4]))
    assert reg.snapshot().version == v
    assert reg.update_person(PersonState([1.0 + 1e-3, 1.0, 1.7]))
    assert reg.snapshot().version == v + 1


def test_configurable_person_size():
    reg = BarrierRegistry(person_radius=0.3, person_height=1.8)
    shape = reg.snapshot().barrier(PERSON_ID).shape
    assert shape.radius == pytest.approx(0.3)
    assert shape.height == pytest.approx(1.8)


def test_snapshot_lookup_missing():
    snap = WorldSnapshot(0, (), 0.0)
    assert snap.barrier("nope") is None
