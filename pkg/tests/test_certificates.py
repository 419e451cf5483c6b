import random
from fractions import Fraction

import pytest

from totalfree import (
    ReducibleInputError,
    arrangement,
    boolean_arrangement,
    braid_arrangement,
    circuit_is_nonfree_check,
    decide_totally_free,
    deletion,
    find_generic_circuit,
    generic_arrangement,
    gmp2_from_exponents,
    gmp2_max,
    gmp2_max_exhaustive,
    gmp2_real_bound,
    is_generic_circuit,
    lmp2,
    lmp2_breakdown,
    exponents_totally_free,
    nonfree_by_lmp_gmp,
    nonfree_multiplicity_family,
    normalize_hyperplane,
    product,
    restriction,
    subarrangement,
    verify_certificate,
)
from oracles import exhaustive_e2_max, random_invertible

THREE_LINES = arrangement(2, [(1, 0), (0, 1), (1, -1)])


def _transformed(arr, change):
    rows = [[sum(h.normal[k] * change.entries[k][j] for k in range(arr.dim))
             for j in range(arr.dim)] for h in arr.hyperplanes]
    return arrangement(arr.dim, rows)


# -- mixed products ----------------------------------------------------------


def test_lmp2_braid_s4_simple():
    assert lmp2(braid_arrangement(4), (1,) * 6) == 11


def test_lmp2_boolean():
    assert lmp2(boolean_arrangement(3), (1, 2, 3)) == 11


def test_lmp2_three_lines_double():
    assert lmp2(THREE_LINES, (2, 2, 2)) == 9


def test_lmp2_breakdown_consistency():
    breakdown = lmp2_breakdown(braid_arrangement(4), (1,) * 6)
    assert len(breakdown) == 7
    products = sorted(pair.product for _, pair in breakdown)
    assert products == [1, 1, 1, 2, 2, 2, 2]


def test_gmp2_from_exponents():
    assert gmp2_from_exponents((1, 2, 3)) == 11
    assert gmp2_from_exponents((7, 0, 0, 0)) == 0
    assert gmp2_from_exponents((3, 3)) == 9


def test_gmp2_max_examples():
    assert gmp2_max(3, 3) == 3
    assert gmp2_max(2, 5) == 6
    assert gmp2_max(3, 38) == 481
    assert gmp2_max(3, 6) == 12
    assert gmp2_max(1, 9) == 0


def test_gmp2_max_matches_exhaustive():
    for rank in range(1, 5):
        for total in range(0, 13):
            assert gmp2_max(rank, total) == exhaustive_e2_max(rank, total)
    assert gmp2_max_exhaustive(3, 38) == 481


def test_gmp2_real_bound_dominates():
    for rank in range(1, 6):
        for total in range(0, 25):
            assert gmp2_max(rank, total) <= gmp2_real_bound(rank, total)


# -- nonfree_by_lmp_gmp ------------------------------------------------------


def test_braid_s4_simple_inconclusive():
    assert nonfree_by_lmp_gmp(braid_arrangement(4), (1,) * 6) is None


def test_rank2_always_inconclusive():
    rng = random.Random(51)
    for arr in (THREE_LINES, generic_arrangement(5, 2, seed=5)):
        for _ in range(6):
            m = tuple(rng.randint(1, 5) for _ in range(arr.n))
            assert nonfree_by_lmp_gmp(arr, m) is None


def test_braid_s4_circuit_multiplicity_certificate():
    arr = braid_arrangement(4)
    # multiplicity 9 on the circuit {x1-x2, x3-x4, x1-x3, x2-x4}, 1 elsewhere
    circuit = {0, 5, 1, 4}
    m = tuple(9 if i in circuit else 1 for i in range(6))
    cert = nonfree_by_lmp_gmp(arr, m)
    assert cert is not None
    assert cert.lmp2_lower >= 6 * 81 == 486
    assert cert.gmp2_upper == 481
    assert cert.rank == 3 and cert.total_multiplicity == 38
    assert verify_certificate(arr, cert)


# -- generic circuits --------------------------------------------------------


def test_find_circuit_braid_s4_both_methods():
    arr = braid_arrangement(4)
    proof = find_generic_circuit(arr, method="proof")
    brute = find_generic_circuit(arr, method="brute")
    assert len(proof.indices) == len(brute.indices) == 4
    assert is_generic_circuit(arr, proof.indices)
    assert is_generic_circuit(arr, brute.indices)
    assert brute.indices == (0, 1, 4, 5)  # lexicographically first valid subset


def test_find_circuit_boolean_rejected():
    with pytest.raises(ReducibleInputError):
        find_generic_circuit(boolean_arrangement(3))


def test_find_circuit_rank2_rejected():
    with pytest.raises(ReducibleInputError):
        find_generic_circuit(THREE_LINES)


def test_find_circuit_braid_s5_and_s6():
    for dim in (5, 6):
        arr = braid_arrangement(dim)
        for method in ("proof", "brute"):
            circuit = find_generic_circuit(arr, method=method)
            assert len(circuit.indices) == dim  # rank is dim-1
            assert is_generic_circuit(arr, circuit.indices)


def test_find_circuit_generic_input():
    arr = generic_arrangement(6, 4, seed=8)
    if arr.rank() >= 3 and len(__import__("totalfree").connected_components(arr)) == 1:
        for method in ("proof", "brute"):
            assert is_generic_circuit(arr, find_generic_circuit(arr, method).indices)


def test_find_circuit_case1_branch():
    # Deleting the first hyperplane disconnects {x, y, x+y} from {z}, and the
    # restriction to x+2y+z has no image collisions, so the rank-3 base case
    # runs its all-images-distinct branch.
    arr = arrangement(3, [(1, 2, 1), (1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1)])
    from totalfree import connected_components, deletion as delete_op
    assert len(connected_components(arr)) == 1
    assert len(connected_components(delete_op(arr, 0))) == 2
    res = restriction(arr, 0)
    assert res.arrangement.n == 4  # injective restriction
    circuit = find_generic_circuit(arr, method="proof")
    assert circuit.indices == (0, 1, 2, 4)
    assert is_generic_circuit(arr, circuit.indices)


def test_find_circuit_fuzz_random_connected():
    rng = random.Random(63)
    from totalfree import connected_components
    found = 0
    while found < 12:
        dim = rng.randint(3, 5)
        n = rng.randint(dim + 1, dim + 4)
        rows = []
        while len(rows) < n:
            v = tuple(rng.randint(-3, 3) for _ in range(dim))
            if any(v):
                h = normalize_hyperplane(v).normal
                if h not in rows:
                    rows.append(h)
        arr = arrangement(dim, rows)
        if arr.rank() < 3 or len(connected_components(arr)) != 1:
            continue
        found += 1
        for method in ("proof", "brute"):
            circuit = find_generic_circuit(arr, method=method)
            assert is_generic_circuit(arr, circuit.indices)


def test_circuit_check_values():
    chk3 = circuit_is_nonfree_check(3)
    assert (chk3.lmp2, chk3.gmp2_real_bound, chk3.gap) == (6, Fraction(16, 3), Fraction(2, 3))
    chk4 = circuit_is_nonfree_check(4)
    assert (chk4.lmp2, chk4.gmp2_real_bound, chk4.gap) == (10, Fraction(75, 8), Fraction(5, 8))
    chk5 = circuit_is_nonfree_check(5)
    assert (chk5.lmp2, chk5.gmp2_real_bound, chk5.gap) == (15, Fraction(72, 5), Fraction(3, 5))
    with pytest.raises(ValueError):
        circuit_is_nonfree_check(2)


# -- the k0 family -----------------------------------------------------------


def test_k0_braid_s4():
    arr = braid_arrangement(4)
    circuit, k0, m = nonfree_multiplicity_family(arr)
    assert k0 == 9
    assert sorted(m, reverse=True) == [9, 9, 9, 9, 1, 1]
    assert all(m[i] == 9 for i in circuit.indices)
    # both sides at k0-1 and k0, as in the threshold definition
    assert 6 * 8 * 8 <= gmp2_max(3, 34)
    assert 6 * 9 * 9 > gmp2_max(3, 38)
    assert gmp2_max(3, 34) == 385


def test_k0_braid_s5():
    circuit, k0, m = nonfree_multiplicity_family(braid_arrangement(5))
    assert k0 == 31
    assert 10 * 30 * 30 <= gmp2_max(4, 155) == 9009
    assert 10 * 31 * 31 > gmp2_max(4, 160) == 9600


def test_k0_rejects_rank2():
    with pytest.raises(ReducibleInputError):
        nonfree_multiplicity_family(THREE_LINES)


def test_k0_of_a_bare_circuit_is_one():
    # A generic circuit itself is never free, so already m=1 certifies.
    arr = arrangement(3, [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)])
    circuit, k0, m = nonfree_multiplicity_family(arr)
    assert k0 == 1 and m == (1, 1, 1, 1)
    assert 6 > gmp2_max(3, 4) == 5


# -- decide_totally_free -----------------------------------------------------


def test_decide_product_of_small_factors():
    arr = product(product(THREE_LINES, arrangement(1, [(1,)])), arrangement(1, [(1,)]))
    verdict = decide_totally_free(arr)
    assert verdict.totally_free
    assert verdict.decomposition.factor_ranks() == (2, 1, 1)
    assert verdict.witness is None


def test_decide_braid_s4():
    verdict = decide_totally_free(braid_arrangement(4))
    assert not verdict.totally_free
    w = verdict.witness
    assert w.k0 == 9
    assert len(w.circuit_original) == 4
    assert is_generic_circuit(braid_arrangement(4), w.circuit_original)
    cert = w.certificate
    assert cert.lmp2_lower == 523  # exact LMP2 at the k0 multiplicity
    assert cert.gmp2_upper == 481
    assert cert.multiplicity == tuple(9 if i in set(w.circuit_original) else 1
                                      for i in range(6))
    assert verify_certificate(braid_arrangement(4), cert)


def test_decide_empty():
    from totalfree import Arrangement
    verdict = decide_totally_free(Arrangement(3, ()))
    assert verdict.totally_free
    assert verdict.decomposition.factors == ()
    assert verdict.decomposition.trivial_directions == 3


def test_decide_reducible_with_rank3_factor():
    # braid-S4 x {z}: certificate numbers are computed on the braid factor
    arr = product(braid_arrangement(4), arrangement(1, [(1,)]))
    verdict = decide_totally_free(arr)
    assert not verdict.totally_free
    w = verdict.witness
    assert w.factor.indices == tuple(range(6))
    assert w.k0 == 9
    assert w.certificate.rank == 3
    assert w.certificate.total_multiplicity == 38
    assert len(w.certificate.multiplicity) == 7
    assert w.certificate.multiplicity[6] == 1
    assert verify_certificate(arr, w.certificate)


# -- theorem-level invariants ------------------------------------------------


def test_lmp_gmp_consistency_on_totally_free():
    rng = random.Random(71)
    corpus = [
        boolean_arrangement(3),
        boolean_arrangement(4),
        THREE_LINES,
        product(THREE_LINES, arrangement(1, [(1,)])),
        product(THREE_LINES, THREE_LINES),
        product(generic_arrangement(4, 2, seed=13), boolean_arrangement(2)),
    ]
    checked = 0
    for arr in corpus:
        assert decide_totally_free(arr).totally_free
        for _ in range(10):
            m = tuple(rng.randint(1, 5) for _ in range(arr.n))
            exps = exponents_totally_free(arr, m)
            assert lmp2(arr, m) == gmp2_from_exponents(exps)
            checked += 1
    assert checked >= 50


def test_certificate_tail_k0_plus():
    for dim in (4, 5):
        arr = braid_arrangement(dim)
        circuit, k0, _ = nonfree_multiplicity_family(arr)
        rank = arr.rank()
        n = arr.n
        members = set(circuit.indices)
        for k in (k0, k0 + 1, k0 + 5):
            total = (k - 1) * (rank + 1) + n
            subset_bound = (rank + 1) * rank // 2 * k * k
            assert subset_bound > gmp2_max(rank, total)
            m = tuple(k if i in members else 1 for i in range(n))
            cert = nonfree_by_lmp_gmp(arr, m)
            assert cert is not None and cert.lmp2_lower > cert.gmp2_upper


def test_closure_under_deletion_and_restriction():
    corpus = [
        boolean_arrangement(4),
        product(THREE_LINES, boolean_arrangement(2)),
        product(THREE_LINES, THREE_LINES),
    ]
    for arr in corpus:
        assert decide_totally_free(arr).totally_free
        for h in range(arr.n):
            assert decide_totally_free(deletion(arr, h)).totally_free
            assert decide_totally_free(restriction(arr, h).arrangement).totally_free


def test_braid_restriction_becomes_totally_free():
    arr = braid_arrangement(4)
    assert not decide_totally_free(arr).totally_free
    tags = [decide_totally_free(restriction(arr, h).arrangement).totally_free
            for h in range(arr.n)]
    assert any(tags)


def test_verdict_invariant_under_coordinate_change():
    rng = random.Random(97)
    for arr in (braid_arrangement(4), boolean_arrangement(3),
                product(THREE_LINES, arrangement(1, [(1,)]))):
        base = decide_totally_free(arr).totally_free
        for _ in range(4):
            moved = _transformed(arr, random_invertible(rng, arr.dim))
            assert decide_totally_free(moved).totally_free == base


def test_verify_rejects_tampered_certificate():
    import dataclasses
    arr = braid_arrangement(4)
    cert = decide_totally_free(arr).witness.certificate
    weakened = dataclasses.replace(cert, multiplicity=(1,) * 6,
                                   total_multiplicity=6)
    assert not verify_certificate(arr, weakened)
    inflated = dataclasses.replace(cert, lmp2_lower=cert.lmp2_lower + 1)
    assert not verify_certificate(arr, inflated)


def test_certificate_inequality_enforced_at_construction():
    from totalfree import InternalInvariantError, NonFreenessCertificate
    from totalfree.certificates import CertificateExplanation
    from fractions import Fraction as F
    expl = CertificateExplanation("LMP2>GMP2max", (0, 1), None, None, None, F(1))
    with pytest.raises(InternalInvariantError):
        NonFreenessCertificate(5, True, 5, 2, 4, (2, 2), expl)


def test_subarrangement_certificate_path():
    # verify_certificate rebuilds the factor's flats from the original input
    arr = braid_arrangement(4)
    verdict = decide_totally_free(arr)
    cert = verdict.witness.certificate
    sub = subarrangement(arr, cert.explanation.factor_indices)
    assert sub == arr
