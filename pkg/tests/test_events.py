# pyre-strict
import unittest

import numpy as np
import polars as pl
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from evtcrypt.core.errors import FormatError, OutOfBoundsError, PairingRangeError
from evtcrypt.core.events import (
    MAX_CODE,
    MAX_COORD,
    Event,
    EventStream,
    Pixel,
    Resolution,
    SpatialPlane,
    canonical_sort,
    l1_space,
    l1_time,
    project_plane,
    szudzik_pair,
    szudzik_pair_array,
    szudzik_unpair,
    szudzik_unpair_array,
)
from evtcrypt.core.prng import SplitMix64, sign_block, splitmix64_block
from evtcrypt.formats.binary import BINARY


def to_events(rows: list[tuple[int, int, int, int]]) -> list[Event]:
    return [Event(pixel=Pixel(x=x, y=y), polarity=p, timestamp=t) for t, x, y, p in rows]


class TestSzudzik(unittest.TestCase):
    def test_pair(self) -> None:
        self.assertEqual(szudzik_pair(Pixel(x=0, y=0)), 0)
        self.assertEqual(szudzik_pair(Pixel(x=1, y=2)), 5)
        self.assertEqual(szudzik_pair(Pixel(x=2, y=1)), 7)
        self.assertEqual(szudzik_pair(Pixel(x=MAX_COORD, y=MAX_COORD)), MAX_CODE)

    def test_unpair(self) -> None:
        self.assertEqual(szudzik_unpair(0), Pixel(x=0, y=0))
        self.assertEqual(szudzik_unpair(5), Pixel(x=1, y=2))
        self.assertEqual(szudzik_unpair(7), Pixel(x=2, y=1))

    def test_unpair_out_of_range(self) -> None:
        with self.assertRaises(PairingRangeError):
            szudzik_unpair(MAX_CODE + 1)
        with self.assertRaises(PairingRangeError):
            szudzik_unpair(-1)

    def test_grid_bijection(self) -> None:
        ys, xs = np.mgrid[0:256, 0:256]
        codes = szudzik_pair_array(xs.ravel(), ys.ravel())
        self.assertEqual(len(np.unique(codes)), 256 * 256)
        ux, uy = szudzik_unpair_array(codes)
        np.testing.assert_array_equal(ux, xs.ravel())
        np.testing.assert_array_equal(uy, ys.ravel())

    def test_random_pixels_round_trip(self) -> None:
        rng = np.random.default_rng(3)
        xs = rng.integers(0, MAX_COORD + 1, size=100_000)
        ys = rng.integers(0, MAX_COORD + 1, size=100_000)
        ux, uy = szudzik_unpair_array(szudzik_pair_array(xs, ys))
        np.testing.assert_array_equal(ux, xs)
        np.testing.assert_array_equal(uy, ys)

    @given(st.integers(0, MAX_COORD), st.integers(0, MAX_COORD))
    def test_scalar_matches_vectorized(self, x: int, y: int) -> None:
        code = szudzik_pair(Pixel(x=x, y=y))
        self.assertEqual(code, int(szudzik_pair_array(np.array([x]), np.array([y]))[0]))
        self.assertEqual(szudzik_unpair(code), Pixel(x=x, y=y))


class TestDistances(unittest.TestCase):
    def test_l1_space(self) -> None:
        self.assertEqual(l1_space(Pixel(x=1, y=1), Pixel(x=1, y=1)), 0)
        self.assertEqual(l1_space(Pixel(x=1, y=1), Pixel(x=2, y=1)), 1)
        self.assertEqual(l1_space(Pixel(x=0, y=0), Pixel(x=2, y=3)), 5)

    def test_l1_time(self) -> None:
        self.assertEqual(l1_time(100, 100), 0)
        self.assertEqual(l1_time(100, 150), 50)
        self.assertEqual(l1_time(221, 105), 116)

    @given(
        st.tuples(st.integers(0, MAX_COORD), st.integers(0, MAX_COORD)),
        st.tuples(st.integers(0, MAX_COORD), st.integers(0, MAX_COORD)),
        st.tuples(st.integers(0, MAX_COORD), st.integers(0, MAX_COORD)),
    )
    def test_l1_space_is_a_metric(
        self, a: tuple[int, int], b: tuple[int, int], c: tuple[int, int]
    ) -> None:
        pa, pb, pc = (Pixel(x=x, y=y) for x, y in (a, b, c))
        self.assertEqual(l1_space(pa, pb), l1_space(pb, pa))
        self.assertLessEqual(l1_space(pa, pc), l1_space(pa, pb) + l1_space(pb, pc))
        self.assertEqual(l1_space(pa, pb) == 0, pa == pb)

    @given(st.integers(0, 2**63 - 1), st.integers(0, 2**63 - 1))
    def test_l1_time_is_symmetric(self, a: int, b: int) -> None:
        self.assertEqual(l1_time(a, b), l1_time(b, a))
        self.assertEqual(l1_time(a, b), abs(a - b))


class TestEventStream(unittest.TestCase):
    def setUp(self) -> None:
        self.res = Resolution(width=4, height=4)

    def test_from_events(self) -> None:
        events = [
            Event(pixel=Pixel(x=1, y=1), polarity=1, timestamp=200),
            Event(pixel=Pixel(x=0, y=0), polarity=-1, timestamp=100),
        ]
        stream = EventStream.from_events(events, self.res)
        self.assertEqual(len(stream), 2)
        self.assertEqual(stream.events, events)
        self.assertEqual(stream.time_range(), (100, 200))

    def test_schema_is_coerced(self) -> None:
        df = pl.DataFrame({"p": [1], "y": [0], "x": [2], "t": [5], "extra": ["a"]})
        stream = EventStream(resolution=self.res, data=df)
        self.assertEqual(stream.data.columns, ["t", "x", "y", "p"])
        self.assertEqual(stream.data["p"].dtype, pl.Int8)

    def test_invalid_polarity(self) -> None:
        with self.assertRaises(FormatError):
            EventStream.from_arrays(self.res, [1], [0], [0], [0])

    def test_negative_timestamp(self) -> None:
        with self.assertRaises(FormatError):
            EventStream.from_arrays(self.res, [-1], [0], [0], [1])

    def test_out_of_bounds(self) -> None:
        with self.assertRaises(OutOfBoundsError):
            EventStream.from_arrays(self.res, [100], [9], [0], [1])

    def test_missing_columns(self) -> None:
        with self.assertRaises(FormatError):
            EventStream(resolution=self.res, data=pl.DataFrame({"t": [1]}))

    def test_resolution_bounds(self) -> None:
        with self.assertRaises(ValidationError):
            Resolution(width=0, height=4)
        with self.assertRaises(ValidationError):
            Resolution(width=MAX_COORD + 1, height=4)

    def test_event_polarity(self) -> None:
        with self.assertRaises(ValidationError):
            Event(pixel=Pixel(x=0, y=0), polarity=0, timestamp=1)  # type: ignore[arg-type]


class TestCanonicalSort(unittest.TestCase):
    def setUp(self) -> None:
        self.res = Resolution(width=4, height=4)

    def test_empty(self) -> None:
        stream = canonical_sort(EventStream(resolution=self.res))
        self.assertEqual(len(stream), 0)

    def test_sorts_by_time(self) -> None:
        stream = EventStream.from_arrays(self.res, [200, 100], [1, 0], [1, 0], [1, -1])
        self.assertEqual(canonical_sort(stream).data["t"].to_list(), [100, 200])

    def test_ties_break_on_code(self) -> None:
        stream = EventStream.from_arrays(self.res, [100, 100], [2, 1], [1, 2], [1, 1])
        ordered = canonical_sort(stream).data
        self.assertEqual(list(zip(ordered["x"], ordered["y"], strict=True)), [(1, 2), (2, 1)])

    def test_ties_break_on_polarity(self) -> None:
        stream = EventStream.from_arrays(self.res, [100, 100], [1, 1], [1, 1], [1, -1])
        self.assertEqual(canonical_sort(stream).data["p"].to_list(), [-1, 1])

    @given(st.lists(st.tuples(st.integers(0, 1000), st.integers(0, 3), st.integers(0, 3), st.sampled_from([-1, 1]))))
    @settings(max_examples=50)
    def test_idempotent(self, rows: list[tuple[int, int, int, int]]) -> None:
        t, x, y, p = (list(c) for c in zip(*rows, strict=True)) if rows else ([], [], [], [])
        once = canonical_sort(EventStream.from_arrays(self.res, t, x, y, p))
        self.assertTrue(once.is_canonical())
        self.assertTrue(canonical_sort(once).data.equals(once.data))

    @given(
        st.lists(
            st.tuples(st.integers(0, 1000), st.integers(0, 3), st.integers(0, 3), st.sampled_from([-1, 1])),
            min_size=1,
        ),
        st.data(),
    )
    @settings(max_examples=50)
    def test_any_permutation_gives_same_bytes(
        self, rows: list[tuple[int, int, int, int]], data: st.DataObject
    ) -> None:
        shuffled = data.draw(st.permutations(rows))
        streams = [EventStream.from_events(to_events(r), self.res) for r in (rows, shuffled)]
        a, b = (BINARY.encode(canonical_sort(s)) for s in streams)
        self.assertEqual(a, b)


class TestSpatialPlane(unittest.TestCase):
    def test_project_empty(self) -> None:
        plane = project_plane(EventStream(resolution=Resolution(width=3, height=3)))
        self.assertEqual(len(plane), 0)

    def test_project_dedups(self) -> None:
        res = Resolution(width=3, height=3)
        stream = EventStream.from_arrays(res, [1, 2, 3], [1, 1, 0], [1, 1, 2], [1, -1, 1])
        plane = project_plane(stream)
        self.assertEqual(set(plane.pixels()), {Pixel(x=1, y=1), Pixel(x=0, y=2)})
        self.assertIn((1, 1), plane)
        self.assertNotIn((2, 2), plane)

    def test_single_pixel(self) -> None:
        res = Resolution(width=8, height=8)
        stream = EventStream.from_arrays(res, range(1000), [5] * 1000, [5] * 1000, [1] * 1000)
        self.assertEqual(project_plane(stream).pixels(), [Pixel(x=5, y=5)])

    def test_codes_are_normalized(self) -> None:
        plane = SpatialPlane(codes=[7, 0, 7, 3])
        self.assertEqual(plane.codes, (0, 3, 7))

    def test_codes_out_of_range(self) -> None:
        with self.assertRaises(PairingRangeError):
            SpatialPlane(codes=[MAX_CODE + 1])

    def test_fits(self) -> None:
        plane = SpatialPlane.from_pixels([(0, 0), (3, 1)])
        self.assertTrue(plane.fits(Resolution(width=4, height=2)))
        self.assertFalse(plane.fits(Resolution(width=3, height=3)))


class TestSplitMix64(unittest.TestCase):
    def test_known_output(self) -> None:
        self.assertEqual(SplitMix64(0).next(), 0xE220A8397B1DCDAF)

    def test_block_matches_scalar(self) -> None:
        rng = SplitMix64(42)
        expected = [rng.next() for _ in range(20)]
        self.assertEqual([int(v) for v in splitmix64_block(42, 0, 20)], expected)
        self.assertEqual([int(v) for v in splitmix64_block(42, 5, 3)], expected[5:8])

    def test_sign_block_matches_scalar(self) -> None:
        rng = SplitMix64(7)
        expected = [rng.next_sign() for _ in range(64)]
        self.assertEqual(sign_block(7, 0, 64).tolist(), expected)

    def test_empty_block(self) -> None:
        self.assertEqual(len(splitmix64_block(1, 0, 0)), 0)


if __name__ == "__main__":
    unittest.main()
