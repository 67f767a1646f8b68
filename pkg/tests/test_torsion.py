"""Zeta bookkeeping and the Reeb decomposition of the torsion function."""

import csv
import io
import json

import numpy as np
import pytest

from ruminlab.model import lens_space
from ruminlab.spectral import Assembly
from ruminlab.torsion import (
    ESTIMATE_CAVEAT,
    ZetaSeries,
    block_zeta_series,
    kappa_partial,
    kappa_weights,
    reeb_decomposition,
    torsion_estimate,
    zeta_partial,
)


# -- zeta series -----------------------------------------------------------------


def test_zeta_partial_single_term():
    z = ZetaSeries("demo", [(4.0, 1)])
    assert zeta_partial(z, 1.0) == pytest.approx(0.25)


def test_zeta_partial_small_multiset():
    z = ZetaSeries("demo", [(1.0, 2), (4.0, 1)])
    assert zeta_partial(z, 2.0) == pytest.approx(2.0625)


def test_zeta_partial_empty_is_zero():
    assert zeta_partial(ZetaSeries("empty"), 3.0) == 0.0


def test_zeta_partial_validates():
    with pytest.raises(ValueError):
        zeta_partial(ZetaSeries("demo", [(1.0, 1)]), 0.0)
    with pytest.raises(ValueError):
        zeta_partial(ZetaSeries("demo", [(-1.0, 1)]), 2.0)


def test_zeta_partial_cauchy_in_cutoff(s3):
    values = []
    for mw in (2, 4, 6):
        series = block_zeta_series(Assembly(s3, mw), 0)
        values.append(zeta_partial(series, 3.0))
    assert values[0] < values[1] < values[2]
    assert values[2] - values[1] < values[1] - values[0]


def test_kappa_weights():
    assert kappa_weights(1) == [-2, 1]
    assert kappa_weights(2) == [-3, 2, -1]


def test_kappa_on_empty_truncation_is_zero():
    # the twisted quotient has no weight-0 block, so nothing survives the cutoff
    asm = Assembly(lens_space(2, character=1), 0)
    assert asm.contexts == []
    assert kappa_partial(asm, 2.0) == 0.0


def test_kappa_requires_safe_exponent(s3_asm_small):
    with pytest.raises(ValueError):
        kappa_partial(s3_asm_small, 1.5)


def test_kappa_partial_decreases_with_cutoff(s3):
    # every added block contributes a negative increment on these models
    vals = [kappa_partial(Assembly(s3, mw), 2.0) for mw in (1, 2, 3)]
    assert vals[0] > vals[1] > vals[2]


# -- Reeb decomposition ------------------------------------------------------------


@pytest.fixture(scope="module")
def s3_reeb(s3_asm_small):
    return reeb_decomposition(s3_asm_small)


def test_reeb_checks_pass(s3_reeb):
    assert s3_reeb.passed, s3_reeb.checks.failures()[:4]
    assert s3_reeb.weighted_match


def test_reeb_kernel_dims(s3_reeb):
    assert s3_reeb.kernel_dims == [1, 0]
    assert s3_reeb.cohomology_dims == [1, 0]


def test_weight_one_block_splits_two_by_two(s3_reeb):
    slices = [s for s in s3_reeb.slices if s.block == "m1" and s.degree == 0]
    pieces = sorted((s.piece, s.mult, round(s.delta, 9), round(s.nu, 9)) for s in slices)
    assert pieces == [("reeb_minus", 2, 1.0, -1.0), ("reeb_plus", 2, 1.0, 1.0)]


def test_harmonic_slices_only_in_weight_zero(s3_reeb):
    for s in s3_reeb.slices:
        if s.piece == "harmonic":
            assert s.block == "m0" and s.degree == 0


def test_per_degree_outcomes_document_bi_positive_blocks(s3_reeb):
    # the literal per-degree comparison holds exactly up to weight 1 and fails
    # from weight 2 on, where the bi-positive component is nonempty
    outcomes = s3_reeb.per_degree_outcomes
    assert outcomes[("m0", 0)] and outcomes[("m1", 0)] and outcomes[("m1", 1)]
    assert not outcomes[("m2", 0)]
    assert not outcomes[("m2", 1)]
    assert not s3_reeb.per_degree_match
    # yet the weighted identity and both kappa routes agree exactly
    assert s3_reeb.weighted_match
    for s, lhs in s3_reeb.kappa_from_spectrum.items():
        assert lhs == pytest.approx(s3_reeb.kappa_from_reeb[s], abs=1e-9)


def test_bi_positive_multiplicity_doubles_in_middle_degree(s3_reeb):
    # the telescoping mechanism: q copies at degree 0 vs 2q in the middle
    lows = {}
    mids = {}
    for s in s3_reeb.slices:
        if s.block != "m2" or s.piece != "bi_positive":
            continue
        target = lows if s.degree == 0 else mids
        target[round(s.delta, 6)] = target.get(round(s.delta, 6), 0) + s.mult
    assert lows == {16.0: 3}
    assert mids == {16.0: 6}


def test_reeb_decomposition_twisted_lens():
    asm = Assembly(lens_space(2, character=1), 4)
    rep = reeb_decomposition(asm)
    assert rep.passed
    assert rep.kernel_dims == [0, 0]
    assert rep.cohomology_dims == [0, 0]


def test_reeb_decomposition_untwisted_lens():
    rep = reeb_decomposition(Assembly(lens_space(3, character=0), 3))
    assert rep.passed
    assert rep.kernel_dims == [1, 0]


def test_one_sided_pieces_square_the_reeb_eigenvalue(s3_reeb):
    for s in s3_reeb.slices:
        if s.piece in ("reeb_plus", "reeb_minus"):
            assert s.delta == pytest.approx(s.nu**2, abs=1e-9 * max(1.0, s.delta))


def test_rejects_unsafe_grid(s3_asm_small):
    with pytest.raises(ValueError):
        reeb_decomposition(s3_asm_small, s_grid=(1.0,))


# -- reports ----------------------------------------------------------------------------


def test_torsion_report_json(s3_reeb):
    doc = json.loads(s3_reeb.to_json())
    assert doc["schema"] == 1 and doc["kind"] == "torsion"
    assert doc["weights"] == [-2, 1]
    assert doc["per_degree_match"] is False
    assert doc["weighted_match"] is True
    assert doc["passed"] is True
    assert s3_reeb.to_json() == s3_reeb.to_json()


def test_pairs_csv_schema(s3_reeb):
    rows = list(csv.reader(io.StringIO(s3_reeb.pairs_csv())))
    assert rows[0] == ["block", "degree", "lambda", "piece", "nu", "multiplicity"]
    assert len(rows) > 4
    pieces = {r[3] for r in rows[1:]}
    assert pieces <= {"harmonic", "reeb_plus", "reeb_minus", "bi_positive"}


def test_torsion_estimate_flags_partiality(s3_asm_small):
    rep = torsion_estimate(s3_asm_small, s_grid=(2.0, 3.0))
    assert rep.estimate_only
    assert rep.caveat == ESTIMATE_CAVEAT
    assert set(rep.kappa_from_spectrum) == {2.0, 3.0}
    for v in rep.kappa_from_spectrum.values():
        assert np.isfinite(v)


def test_kappa_consistent_with_direct_sum(s3_asm_small, s3_reeb):
    assert s3_reeb.kappa_from_spectrum[2.0] == pytest.approx(kappa_partial(s3_asm_small, 2.0), abs=1e-12)


def test_cutoff_reported(s3_reeb):
    # the smallest eigenvalue of the first omitted block bounds exactness
    assert s3_reeb.cutoff == pytest.approx(16.0, abs=1e-6)
