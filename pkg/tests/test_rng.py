import numpy as np

from riffle.rng import stream


def test_same_path_same_bits():
    a = stream(123, 4, 5).integers(0, 2**32, size=16)
    b = stream(123, 4, 5).integers(0, 2**32, size=16)
    assert np.array_equal(a, b)


def test_different_paths_differ():
    root = stream(123).integers(0, 2**32, size=16)
    r0 = stream(123, 0).integers(0, 2**32, size=16)
    r1 = stream(123, 1).integers(0, 2**32, size=16)
    deep = stream(123, 0, 1).integers(0, 2**32, size=16)
    assert not np.array_equal(r0, r1)
    assert not np.array_equal(root, r0)
    assert not np.array_equal(r0, deep)


def test_streams_are_insensitive_to_sibling_consumption():
    # Drawing from one replicate's stream must not shift another's.
    s1 = stream(9, 1)
    s1.integers(0, 2**32, size=1000)
    fresh = stream(9, 2).integers(0, 2**32, size=8)
    assert np.array_equal(fresh, stream(9, 2).integers(0, 2**32, size=8))


def test_generator_is_philox():
    assert stream(0).bit_generator.__class__.__name__ == "Philox"
