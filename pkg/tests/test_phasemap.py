import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpipe.phasemap import (
    Image,
    MappingKind,
    MappingMode,
    PhaseImage,
    ShiftAxis,
    ShiftFill,
    accumulate_phases,
    default_i_range,
    flatten_and_pad,
    map_phases,
    negate_phases,
    shift_image,
)


class TestImage:
    def test_rejects_bad_shapes_and_values(self):
        with pytest.raises(ValueError):
            Image(width=2, height=2, pixels=np.array([1.0, 2.0, 3.0]))
        with pytest.raises(ValueError):
            Image(width=1, height=1, pixels=np.array([-1.0]))
        with pytest.raises(ValueError):
            Image(width=1, height=1, pixels=np.array([np.nan]))

    def test_default_i_range(self):
        assert default_i_range(Image(1, 1, np.array([7.0]), bit_depth_hint=8)) == 256.0
        assert default_i_range(Image(1, 1, np.array([7.0]))) == 8.0


class TestFlattenAndPad:
    def test_22x22_pads_to_512(self):
        image = Image.from_grid(np.ones((22, 22)))
        n, padded = flatten_and_pad(image)
        assert n == 9
        assert padded.size == 512
        assert (padded[484:] == 0).all()
        assert np.count_nonzero(padded == 0) == 28

    def test_power_of_two_needs_no_padding(self):
        n, padded = flatten_and_pad(Image.from_grid(np.ones((8, 8))))
        assert n == 6
        assert padded.size == 64
        assert (padded == 1).all()

    def test_one_by_three(self):
        n, padded = flatten_and_pad(Image(width=3, height=1, pixels=np.array([1.0, 2.0, 3.0])))
        assert n == 2
        np.testing.assert_array_equal(padded, [1, 2, 3, 0])

    def test_row_major_order(self):
        image = Image.from_grid(np.array([[1.0, 2.0], [3.0, 4.0]]))
        _, padded = flatten_and_pad(image)
        np.testing.assert_array_equal(padded, [1, 2, 3, 4])


class TestMapPhases:
    def test_full_turn_midpoint(self):
        image = Image(1, 1, np.array([128.0]))
        out = map_phases(image, MappingMode(MappingKind.FULL_TURN, 256.0))
        assert out.theta[0] == 0.5

    def test_half_turn_boundary_rejected(self):
        mode = MappingMode(MappingKind.HALF_TURN, 16.0)
        with pytest.raises(ValueError, match="outside"):
            map_phases(Image(1, 1, np.array([16.0])), mode)
        out = map_phases(Image(1, 1, np.array([15.0])), mode)
        assert out.theta[0] == 15 / 32

    def test_full_turn_aliasing_rejected(self):
        with pytest.raises(ValueError):
            map_phases(Image(1, 1, np.array([256.0])), MappingMode(MappingKind.FULL_TURN, 256.0))

    def test_zero_maps_to_zero_in_every_mode(self):
        image = Image(1, 1, np.array([0.0]))
        for kind in MappingKind:
            out = map_phases(image, MappingMode(kind, 256.0))
            assert out.theta[0] == 0.0

    def test_signed_centered_wraps_upper_half(self):
        image = Image(width=2, height=1, pixels=np.array([64.0, 192.0]))
        out = map_phases(image, MappingMode(MappingKind.SIGNED_CENTERED, 256.0))
        assert out.theta[0] == 0.25
        assert out.theta[1] == -0.25

    def test_padding_entries_are_exact_zero(self):
        image = Image(width=3, height=1, pixels=np.array([1.0, 2.0, 3.0]))
        out = map_phases(image, MappingMode(MappingKind.HALF_TURN, 4.0))
        assert out.pad_count == 1
        assert out.theta[3] == 0.0

    @given(
        st.floats(min_value=0.0, max_value=100.0, allow_nan=False),
        st.floats(min_value=0.25, max_value=4.0, allow_nan=False),
    )
    @settings(max_examples=50, deadline=None)
    def test_linearity_in_intensity(self, intensity, scale):
        # map(a*I) == a*map(I) whenever both stay in-domain
        mode = MappingMode(MappingKind.HALF_TURN, 512.0)
        one = map_phases(Image(1, 1, np.array([intensity])), mode).theta[0]
        scaled = map_phases(Image(1, 1, np.array([intensity * scale])), mode).theta[0]
        assert scaled == pytest.approx(scale * one, rel=1e-12, abs=1e-15)

    def test_mode_metadata(self):
        assert MappingMode(MappingKind.HALF_TURN, 1.0).compensation == 2.0
        assert MappingMode(MappingKind.FULL_TURN, 1.0).compensation == 1.0
        assert MappingMode(MappingKind.SIGNED_CENTERED, 1.0).compensation == 1.0
        assert not MappingMode(MappingKind.FULL_TURN, 1.0).signed_decode
        assert MappingMode(MappingKind.HALF_TURN, 1.0).signed_decode
        with pytest.raises(ValueError):
            MappingMode(MappingKind.FULL_TURN, 0.0)


class TestHalfTurnAntiAliasing:
    @given(st.lists(st.floats(min_value=0.0, max_value=255.999), min_size=2, max_size=8))
    @settings(max_examples=50, deadline=None)
    def test_pairwise_differences_stay_in_open_half_interval(self, values):
        mode = MappingMode(MappingKind.HALF_TURN, 256.0)
        image = Image(width=len(values), height=1, pixels=np.array(values))
        theta = map_phases(image, mode).theta[: len(values)]
        diffs = theta[:, None] - theta[None, :]
        assert (diffs > -0.5).all()
        assert (diffs < 0.5).all()


class TestShiftImage:
    def test_horizontal_zero_fill(self):
        image = Image.from_grid(np.array([[1.0, 2.0], [3.0, 4.0]]))
        out = shift_image(image, ShiftAxis.HORIZONTAL)
        np.testing.assert_array_equal(out.pixel_grid(), [[0, 1], [0, 3]])

    def test_vertical_zero_fill(self):
        image = Image.from_grid(np.array([[1.0, 2.0], [3.0, 4.0]]))
        out = shift_image(image, ShiftAxis.VERTICAL)
        np.testing.assert_array_equal(out.pixel_grid(), [[0, 0], [1, 2]])

    def test_wrap_fill(self):
        image = Image.from_grid(np.array([[1.0, 2.0], [3.0, 4.0]]))
        out = shift_image(image, ShiftAxis.HORIZONTAL, ShiftFill.WRAP)
        np.testing.assert_array_equal(out.pixel_grid(), [[2, 1], [4, 3]])

    def test_constant_image_has_flat_interior_gradient(self):
        image = Image.from_grid(np.full((4, 4), 9.0))
        shifted = shift_image(image, ShiftAxis.HORIZONTAL)
        gradient = image.pixel_grid() - shifted.pixel_grid()
        assert (gradient[:, 1:] == 0).all()  # only the entering column differs


class TestPhaseArithmetic:
    def make(self, theta):
        theta = np.asarray(theta, dtype=float)
        n = int(np.log2(theta.size))
        return PhaseImage(n=n, theta=theta, mode=MappingMode(MappingKind.HALF_TURN, 256.0))

    def test_negate_examples(self):
        zero = self.make([0.0, 0.0])
        np.testing.assert_array_equal(negate_phases(zero).theta, [0.0, 0.0])
        img = self.make([0.1, 0.2])
        np.testing.assert_allclose(negate_phases(img).theta, [-0.1, -0.2])
        np.testing.assert_array_equal(negate_phases(negate_phases(img)).theta, img.theta)

    def test_accumulate_identity_and_inverse(self):
        a = self.make([0.1, 0.4])
        zero = self.make([0.0, 0.0])
        np.testing.assert_array_equal(accumulate_phases([a, zero]).theta, a.theta)
        np.testing.assert_array_equal(accumulate_phases([a, negate_phases(a)]).theta, [0.0, 0.0])

    def test_sum_is_not_reduced(self):
        a = self.make([0.3, 0.0])
        b = self.make([0.4, 0.0])
        total = accumulate_phases([a, b])
        assert total.theta[0] == pytest.approx(0.7, abs=1e-15)  # wraps only at decode

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            accumulate_phases([self.make([0.1, 0.2]), self.make([0.1, 0.2, 0.3, 0.4])])

    def test_phase_image_invariants(self):
        with pytest.raises(ValueError):
            PhaseImage(n=1, theta=np.array([0.1, 0.2, 0.3]),
                       mode=MappingMode(MappingKind.FULL_TURN, 1.0))
        with pytest.raises(ValueError):
            PhaseImage(n=1, theta=np.array([0.1, np.inf]),
                       mode=MappingMode(MappingKind.FULL_TURN, 1.0))
        with pytest.raises(ValueError):
            PhaseImage(n=1, theta=np.array([0.1, 0.2]),
                       mode=MappingMode(MappingKind.FULL_TURN, 1.0), pad_count=1)
