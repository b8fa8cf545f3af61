import math
import random

import pytest

from apckernel.coding import (
    AmbiguousDecode,
    CodeScheme,
    DecodeError,
    DigitOverflow,
    NoSolution,
    PrecisionError,
    class_value,
    decode_exact,
    decode_power,
    default_power_base,
    labellings_of_length,
    make_weight_assignment,
    precision_budget,
    strip_start_code,
)
from apckernel.counting import Domain, count_all
from apckernel.graph import Graph
from apckernel.oracle import dfs_enumerate

from conftest import cycle, path

E, PI = math.e, math.pi


def test_exact_codes():
    s = CodeScheme.exact(3)
    assert s.codes == (1.0, E, PI)
    assert len(set(CodeScheme.exact(5).codes)) == 5
    with pytest.raises(ValueError):
        CodeScheme.exact(2, [1.0, 1.0])


def test_power_codes():
    assert CodeScheme.power(3, 32).codes == (1, 32, 1024)
    with pytest.raises(ValueError):
        CodeScheme.power(3, 1)


def test_weight_assignment():
    g = path(3, [0, 2, 1])
    assert make_weight_assignment(g, CodeScheme.exact(3), Domain.FLOAT64).weights == (1.0, PI, E)
    assert make_weight_assignment(g, CodeScheme.power(3, 32), Domain.BIGINT).weights == (1, 1024, 32)
    with pytest.raises(ValueError):
        make_weight_assignment(g, CodeScheme.exact(3), Domain.BIGINT)
    with pytest.raises(ValueError):
        make_weight_assignment(path(2, [0, 3]), CodeScheme.power(3, 32), Domain.BIGINT)


def test_k1_degenerates_to_plain():
    g = cycle(5)
    w = make_weight_assignment(g, CodeScheme.power(1, 64), Domain.BIGINT)
    assert w.weights == (1,) * 5
    assert count_all(g, w, 5) == count_all(g, max_length=5)


def test_strip_start_code():
    s = CodeScheme.power(4, 10)  # codes 1, 10, 100, 1000 stand in for B, C, D
    g = path(3, [1, 2, 3])
    coded = count_all(g, make_weight_assignment(g, s, Domain.BIGINT), 2)
    assert coded[0, 2, 2] == 10 * 100
    assert strip_start_code(coded[0, 2, 2], 1, s) == 100
    assert strip_start_code(coded[0, 1, 1], 1, s) == 1
    tri = cycle(3, [1, 2, 3])
    c = count_all(tri, make_weight_assignment(tri, s, Domain.BIGINT), 3)
    # two orientations from vertex 0: 0->1->2->0 and 0->2->1->0
    assert c[0, 0, 3] == 2 * 10 * 100 * 1000
    assert strip_start_code(c[0, 0, 3], 1, s) == 2 * 100 * 1000
    with pytest.raises(DecodeError):
        strip_start_code(7, 1, s)


def test_decode_power_digits():
    assert decode_power(3 + 2 * 32 + 32**3, 32, 10).counts == {0: 3, 1: 2, 3: 1}
    assert decode_power(0, 32, 10).counts == {}
    assert decode_power(float(3 + 2 * 32), 32, 10).counts == {0: 3, 1: 2}


def test_decode_power_errors():
    with pytest.raises(DigitOverflow):
        decode_power(32**5, 32, 4)
    with pytest.raises(DigitOverflow):
        decode_power(33, 32, 4, total=34)  # 33 paths of class 0 carried into class 1
    with pytest.raises(PrecisionError):
        decode_power(3.4, 32, 4)
    with pytest.raises(PrecisionError):
        decode_power(2.0**60, 32, 20)


def test_decode_exact_examples():
    s = CodeScheme.exact(3)
    assert decode_exact(2 * E + PI, s, 1).counts == {(0, 1, 0): 2, (0, 0, 1): 1}
    assert decode_exact(5.0, s, 1).counts == {(1, 0, 0): 5}
    assert decode_exact(0.0, s, 3).counts == {}
    assert decode_exact(E * PI + 3 * E * E, s, 2, total=4).counts == {(0, 1, 1): 1, (0, 2, 0): 3}


def test_decode_exact_no_solution():
    with pytest.raises(NoSolution):
        decode_exact(0.5, CodeScheme.exact(3), 1)


def test_decode_exact_ambiguity_surfaced():
    # with rational codes 1, 2, 3 the value 4 has several decodings of length 1
    s = CodeScheme.exact(3, [1.0, 2.0, 3.0])
    with pytest.raises(AmbiguousDecode) as info:
        decode_exact(4.0, s, 1)
    assert len(info.value.solutions) == 2


def test_labellings_and_class():
    labs = labellings_of_length(3, 2)
    assert len(labs) == 6 and all(sum(x) == 2 for x in labs)
    assert class_value((1, 0, 2)) == 4


def test_precision_budget():
    r = precision_budget(3, 5, 32)
    assert r.bits == 50 and r.fits
    assert not precision_budget(3, 6, 32).fits
    assert precision_budget(3, 6, 32, Domain.BIGINT).feasible
    assert not precision_budget(3, 6, 32).feasible


def test_default_power_base():
    assert default_power_base(3, 5, Domain.FLOAT64) == 32
    assert default_power_base(3, 5, Domain.BIGINT, max_count=100) == 128
    with pytest.raises(PrecisionError):
        default_power_base(30, 30, Domain.FLOAT64)


def labelled(seed, n=7, p=0.45, k=3):
    rng = random.Random(seed)
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges, [rng.randrange(k) for _ in range(n)])


@pytest.mark.parametrize("seed", range(6))
def test_power_round_trip(seed):
    g = labelled(seed)
    o = dfs_enumerate(g, 5, k=3)
    plain = count_all(g, max_length=5)
    s = CodeScheme.power(3, default_power_base(3, 4, Domain.BIGINT, int(plain.data.max())))
    coded = count_all(g, make_weight_assignment(g, s, Domain.BIGINT), 5)
    for (u, v, l), x in plain.items():
        dec = decode_power(strip_start_code(coded[u, v, l], g.labels[u], s), s.base, s.max_class(l - 1), total=x)
        assert dec.counts == o.class_counts(u, v, l)


@pytest.mark.parametrize("seed", range(6))
def test_exact_round_trip(seed):
    g = labelled(seed, n=6)
    o = dfs_enumerate(g, 4, k=3)
    s = CodeScheme.exact(3)
    plain = count_all(g, max_length=4)
    coded = count_all(g, make_weight_assignment(g, s, Domain.FLOAT64), 4)
    checked = 0
    for (u, v, l), x in plain.items():
        try:
            dec = decode_exact(strip_start_code(coded[u, v, l], g.labels[u], s), s, l - 1, total=x)
        except AmbiguousDecode:
            continue
        assert dec.counts == o.labelling_counts(u, v, l)
        checked += 1
    assert checked > 0
