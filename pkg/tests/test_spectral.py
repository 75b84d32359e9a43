import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from scrc.errors import AlignmentError, DimensionError, NumericError, OracleCapError
from scrc.spectral import (
    SignalWindow,
    center,
    circular_shift,
    circulant_from_vector,
    dft_matrix,
    eigenvalues_dense,
    eigenvalues_fast,
    extract_features,
    spectral_features,
    time_features,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def vectors(min_size=2, max_size=64):
    return st.integers(min_size, max_size).flatmap(lambda n: arrays(float, n, elements=finite))


def match_multiset(a, b, tol):
    """Greedy nearest pairing; fine for the well-separated tolerances used here."""
    b = list(b)
    for z in a:
        j = int(np.argmin([abs(z - w) for w in b]))
        if abs(z - b[j]) > tol:
            return False
        b.pop(j)
    return True


def test_order_one_circulant():
    assert circulant_from_vector([5.0]).materialize().tolist() == [[5.0]]


def test_three_by_three_layout():
    C = circulant_from_vector([1, 2, 3]).materialize()
    assert C.tolist() == [[1, 2, 3], [3, 1, 2], [2, 3, 1]]


def test_impulse_gives_identity():
    assert np.array_equal(circulant_from_vector([1, 0, 0, 0]).materialize(), np.eye(4))


def test_empty_generator_rejected():
    with pytest.raises(DimensionError):
        circulant_from_vector([])


def test_non_finite_rejected():
    with pytest.raises(NumericError):
        eigenvalues_fast([1.0, np.nan, 2.0])


def test_short_window_rejected():
    with pytest.raises(DimensionError):
        SignalWindow([1.0])


def test_constant_eigenvalues():
    np.testing.assert_allclose(eigenvalues_fast(np.ones(4)), [4, 0, 0, 0], atol=1e-14)


def test_alternating_eigenvalues():
    np.testing.assert_allclose(eigenvalues_fast([1, -1, 1, -1]), [0, 0, 4, 0], atol=1e-14)


def test_dense_oracle_cap():
    with pytest.raises(OracleCapError):
        eigenvalues_dense(circulant_from_vector(np.ones(300)))


@pytest.mark.parametrize("n", [1, 2, 7, 64])
def test_dft_unitary(n):
    F = dft_matrix(n)
    np.testing.assert_allclose(F.conj().T @ F, np.eye(n), atol=1e-12)


@given(vectors(2, 48))
def test_eigenvalue_order_matches_diagonalization(a):
    C = circulant_from_vector(a).materialize()
    F = dft_matrix(a.size)
    lam = np.diag(F.conj().T @ C @ F)
    scale = max(1.0, np.linalg.norm(a)) * a.size
    np.testing.assert_allclose(eigenvalues_fast(a), lam, atol=1e-9 * scale)


@given(vectors(2, 40))
def test_fast_matches_dense_multiset(a):
    fast = eigenvalues_fast(a)
    dense = eigenvalues_dense(circulant_from_vector(a))
    tol = 1e-8 * max(1.0, np.abs(fast).max())
    assert match_multiset(fast, dense, tol * a.size)


@given(vectors(2, 64), st.integers(-200, 200))
def test_shift_preserves_magnitudes(a, s):
    d = np.abs(np.abs(eigenvalues_fast(circular_shift(a, s))) - np.abs(eigenvalues_fast(a)))
    assert d.max() <= 1e-10 * max(np.linalg.norm(a), 1e-300) + 1e-300


@given(vectors(2, 64))
def test_parseval(a):
    lam = eigenvalues_fast(a)
    assert np.isclose(np.sum(np.abs(lam) ** 2), a.size * np.sum(a ** 2), rtol=1e-9, atol=1e-9)


@given(vectors(2, 64))
def test_centering_nulls_dc(a):
    lam = eigenvalues_fast(center(a))
    assert abs(lam[0]) <= 1e-9 * max(np.linalg.norm(a), 1.0)


def test_constant_window_centers_to_zero():
    fv = extract_features([SignalWindow(np.ones(4))])
    np.testing.assert_allclose(fv.values, 0, atol=1e-15)


def test_eight_channel_feature_layout(rng):
    x = rng.standard_normal((8, 100))
    fv = extract_features([SignalWindow(x[c], 10, c) for c in range(8)])
    assert len(fv) == 800 and fv.window_start == 10
    np.testing.assert_allclose(fv.block(0), eigenvalues_fast(x[0] - x[0].mean()), atol=1e-12)
    np.testing.assert_allclose(fv.block(7), eigenvalues_fast(x[7] - x[7].mean()), atol=1e-12)


def test_batch_matches_single(rng):
    x = rng.standard_normal((5, 3, 16))
    batch = spectral_features(x)
    for w in range(5):
        single = extract_features([SignalWindow(x[w, c], 0, c) for c in range(3)]).values
        np.testing.assert_allclose(batch[w], single, atol=1e-12)


def test_misaligned_channels():
    with pytest.raises(AlignmentError):
        extract_features([SignalWindow(np.ones(4), 0, 0), SignalWindow(np.ones(5), 0, 1)])
    with pytest.raises(AlignmentError):
        extract_features([SignalWindow(np.ones(4), 0, 0), SignalWindow(np.ones(4), 3, 1)])


def test_time_features_are_centered_concatenation(rng):
    x = rng.standard_normal((2, 3, 10))
    out = time_features(x)
    assert out.shape == (2, 30)
    np.testing.assert_allclose(out[1, 10:20], x[1, 1] - x[1, 1].mean())


@given(vectors(2, 32), vectors(2, 32))
def test_unitary_equivalence_of_inner_products(a, b):
    # the complex feature map is sqrt(n) times a unitary map, so Gram entries scale by n
    n = min(a.size, b.size)
    a, b = a[:n], b[:n]
    lhs = np.vdot(eigenvalues_fast(a), eigenvalues_fast(b))
    assert np.isclose(lhs, n * np.dot(a, b), rtol=1e-8, atol=1e-6 * n * (1 + np.linalg.norm(a) * np.linalg.norm(b)))
