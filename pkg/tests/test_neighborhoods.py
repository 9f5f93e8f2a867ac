import pytest

from exactseriation.neighborhoods import NeighborhoodSpec, neighbors, parse_offsets

VN = NeighborhoodSpec.von_neumann()
MOORE = NeighborhoodSpec.moore()
CROSS2 = NeighborhoodSpec.cross2()
EPS2 = NeighborhoodSpec.epsilon(2)
BUILTINS = [VN, MOORE, CROSS2, EPS2, NeighborhoodSpec.epsilon(2.5), NeighborhoodSpec.epsilon(3)]


def test_examples():
    assert neighbors(VN, (3, 3), 7, 7) == {(2, 3), (4, 3), (3, 2), (3, 4)}
    assert len(neighbors(MOORE, (0, 0), 7, 7)) == 3
    assert len(neighbors(EPS2, (3, 3), 7, 7)) == 12
    expected = {(3 + d, 3) for d in (-2, -1, 1, 2)} | {(3, 3 + d) for d in (-2, -1, 1, 2)}
    assert neighbors(CROSS2, (3, 3), 7, 7) == expected
    for spec in BUILTINS:
        assert neighbors(spec, (0, 0), 1, 1) == set()


@pytest.mark.parametrize("spec,count", [(VN, 4), (MOORE, 8), (CROSS2, 8), (EPS2, 12)])
def test_interior_counts_and_truncation(spec, count):
    n = m = 9
    for i in range(n):
        for j in range(m):
            nb = neighbors(spec, (i, j), n, m)
            assert (i, j) not in nb
            assert all(0 <= k < n and 0 <= l < m for k, l in nb)
            interior = 2 <= i < n - 2 and 2 <= j < m - 2
            if interior:
                assert len(nb) == count
            elif i in (0, n - 1) or j in (0, m - 1):
                assert len(nb) < count


@pytest.mark.parametrize("spec", BUILTINS)
def test_symmetry(spec):
    n, m = 6, 7
    for i in range(n):
        for j in range(m):
            for k, l in neighbors(spec, (i, j), n, m):
                assert (i, j) in neighbors(spec, (k, l), n, m)


def test_epsilon_equivalences_exhaustive():
    e1, e15 = NeighborhoodSpec.epsilon(1.0), NeighborhoodSpec.epsilon(1.5)
    for n in range(1, 11):
        for m in range(1, 11):
            for i in range(n):
                for j in range(m):
                    assert neighbors(e1, (i, j), n, m) == neighbors(VN, (i, j), n, m)
                    assert neighbors(e15, (i, j), n, m) == neighbors(MOORE, (i, j), n, m)


def test_epsilon_boundary_exact():
    # sqrt(2) is on the boundary of eps = sqrt(2); rational comparison must include it
    assert (1, 1) in NeighborhoodSpec.epsilon(2**0.5).offsets()
    assert (1, 1) not in NeighborhoodSpec.epsilon(1.414).offsets()


def test_errors():
    with pytest.raises(ValueError):
        neighbors(VN, (5, 0), 3, 3)
    with pytest.raises(ValueError):
        NeighborhoodSpec.custom([(0, 0), (1, 0)])
    with pytest.raises(ValueError):
        NeighborhoodSpec.epsilon(0)


def test_custom_and_parse():
    spec = parse_offsets("0,1; 0,-1")
    assert spec.kind == "custom"
    assert set(spec.offsets()) == {(0, 1), (0, -1)}
    assert neighbors(spec, (1, 1), 3, 3) == {(1, 0), (1, 2)}
    assert not NeighborhoodSpec.custom([(0, 1)]).is_symmetric()
    with pytest.raises(ValueError):
        parse_offsets("1;2")
