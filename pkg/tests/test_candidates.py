import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import flood_fill_components, max_filter, pixel_partition
from shuttle_annotate.candidates import (
    Blob,
    PersonMaskMissingError,
    SpatialFilterConfig,
    apply_vertical_filter,
    connected_components,
    label_components,
    remove_person_overlap,
)


def test_diagonal_pixels_form_one_blob():
    mask = np.zeros((5, 5), dtype=bool)
    mask[1, 1] = True
    mask[2, 2] = True
    blobs = connected_components(mask)
    assert len(blobs) == 1
    assert blobs[0].area == 2


def test_empty_mask_yields_no_blobs():
    assert connected_components(np.zeros((5, 5), dtype=bool)) == []


def test_blob_statistics_exact():
    mask = np.zeros((6, 8), dtype=bool)
    mask[1:3, 2:5] = True  # 2x3 rectangle
    (blob,) = connected_components(mask, frame_index=7)
    assert blob.area == 6
    assert blob.bbox == (2, 1, 4, 2)
    assert blob.centroid == (3.0, 1.5)
    assert blob.frame_index == 7
    assert blob.width == 3 and blob.height == 2


def test_ids_assigned_in_raster_order_of_first_pixel():
    mask = np.zeros((6, 6), dtype=bool)
    mask[4, 1] = True  # later in raster order
    mask[0, 4] = True  # first
    mask[2, 0] = True
    blobs = connected_components(mask)
    firsts = sorted((b.bbox[1], b.bbox[0], b.id) for b in blobs)
    assert [i for _, _, i in firsts] == [1, 2, 3]


def test_partition_matches_flood_fill_oracle(rng):
    for _ in range(40):
        mask = rng.random((64, 64)) < 0.3
        labels, _ = label_components(mask)
        assert pixel_partition(labels) == pixel_partition(flood_fill_components(mask))


def test_blob_areas_partition_mask(rng):
    for _ in range(20):
        mask = rng.random((48, 48)) < 0.4
        blobs = connected_components(mask)
        assert sum(b.area for b in blobs) == int(mask.sum())


def test_determinism(rng):
    mask = rng.random((32, 32)) < 0.3
    a = connected_components(mask)
    b = connected_components(mask.copy())
    assert a == b


# ---------------------------------------------------------------------------
# person overlap removal
# ---------------------------------------------------------------------------


def _cfg(y=1000.0, dilation=5, policy="defer-frame"):
    return SpatialFilterConfig(
        y_threshold=y, person_mask_dilation=dilation, missing_mask_policy=policy
    )


def test_blob_inside_person_mask_removed():
    mask = np.zeros((20, 20), dtype=bool)
    mask[5:8, 5:8] = True
    person = np.zeros((20, 20), dtype=bool)
    person[4:10, 4:10] = True
    blobs = connected_components(mask)
    assert remove_person_overlap(blobs, mask, person, _cfg()) == []


def test_blob_beyond_dilation_reach_kept():
    mask = np.zeros((20, 40), dtype=bool)
    mask[5, 25] = True  # 10 px to the right of the person edge
    person = np.zeros((20, 40), dtype=bool)
    person[0:20, 0:16] = True  # person occupies columns 0..15
    blobs = connected_components(mask)
    kept = remove_person_overlap(blobs, mask, person, _cfg(dilation=5))
    assert len(kept) == 1


def test_blob_within_dilation_reach_removed():
    mask = np.zeros((20, 40), dtype=bool)
    mask[5, 18] = True  # 3 px from the person edge at column 15
    person = np.zeros((20, 40), dtype=bool)
    person[0:20, 0:16] = True
    blobs = connected_components(mask)
    # same decision via the brute-force dilation oracle
    dilated = max_filter(person, (11, 11))
    assert dilated[5, 18]
    assert remove_person_overlap(blobs, mask, person, _cfg(dilation=5)) == []


def test_zero_dilation_restores_raw_intersection():
    mask = np.zeros((20, 40), dtype=bool)
    mask[5, 16] = True  # adjacent to but not inside the person
    person = np.zeros((20, 40), dtype=bool)
    person[0:20, 0:16] = True
    blobs = connected_components(mask)
    assert len(remove_person_overlap(blobs, mask, person, _cfg(dilation=0))) == 1


def test_missing_mask_defer_policy_raises():
    mask = np.zeros((10, 10), dtype=bool)
    mask[2, 2] = True
    blobs = connected_components(mask, frame_index=3)
    with pytest.raises(PersonMaskMissingError) as exc:
        remove_person_overlap(blobs, mask, None, _cfg(policy="defer-frame"))
    assert exc.value.frame_index == 3


def test_missing_mask_skip_policy_passes_blobs():
    mask = np.zeros((10, 10), dtype=bool)
    mask[2, 2] = True
    blobs = connected_components(mask)
    out = remove_person_overlap(blobs, mask, None, _cfg(policy="skip-removal"))
    assert out == blobs


def test_person_mask_dimension_mismatch():
    mask = np.zeros((10, 10), dtype=bool)
    mask[2, 2] = True
    blobs = connected_components(mask)
    with pytest.raises(ValueError):
        remove_person_overlap(blobs, mask, np.zeros((5, 5), dtype=bool), _cfg())


# ---------------------------------------------------------------------------
# vertical filter
# ---------------------------------------------------------------------------


def _blob_at(y, x=10.0, bid=1):
    return Blob(id=bid, area=4, bbox=(int(x) - 1, int(y) - 1, int(x), int(y)), centroid=(x, y))


def test_centroid_below_threshold_removed():
    blobs = [_blob_at(1100.0)]
    assert apply_vertical_filter(blobs, _cfg(y=1000.0)) == []


def test_centroid_exactly_at_threshold_kept():
    blobs = [_blob_at(1000.0)]
    assert apply_vertical_filter(blobs, _cfg(y=1000.0)) == blobs


def test_threshold_at_height_removes_nothing():
    blobs = [_blob_at(1199.0), _blob_at(10.0, bid=2)]
    assert apply_vertical_filter(blobs, _cfg(y=1200.0)) == blobs


def test_config_default_fraction():
    cfg = SpatialFilterConfig.for_frame_height(1200)
    assert cfg.y_threshold == pytest.approx(0.83 * 1200)


@settings(max_examples=30, deadline=None)
@given(
    seed=st.integers(0, 10_000),
    y=st.floats(0.0, 64.0),
    dilation=st.integers(0, 4),
)
def test_filters_return_subsets(seed, y, dilation):
    rng = np.random.default_rng(seed)
    mask = rng.random((64, 64)) < 0.2
    person = rng.random((64, 64)) < 0.05
    cfg = SpatialFilterConfig(y_threshold=y, person_mask_dilation=dilation)
    blobs = connected_components(mask)
    after_person = remove_person_overlap(blobs, mask, person, cfg)
    after_vertical = apply_vertical_filter(after_person, cfg)
    ids = {b.id for b in blobs}
    ids_person = {b.id for b in after_person}
    ids_vertical = {b.id for b in after_vertical}
    assert ids_person <= ids
    assert ids_vertical <= ids_person
