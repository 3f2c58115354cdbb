"""Dominance algebra, Pareto filtering, and archive maintenance."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mobo.core import (
    BoxDomain,
    Evaluation,
    EvaluationLog,
    ParetoArchive,
    archive_insert,
    dominates,
    pareto_filter,
)


def brute_force_filter(values: np.ndarray) -> set[tuple]:
    """Independent oracle: pairwise dominance over all ordered pairs."""
    kept = []
    for i, a in enumerate(values):
        if any(dominates(b, a) for j, b in enumerate(values) if j != i):
            continue
        kept.append(tuple(a))
    return set(kept)


vectors = st.lists(
    st.floats(min_value=-100, max_value=100, allow_nan=False), min_size=2, max_size=4
)


class TestDominates:
    def test_strict_improvement(self):
        assert dominates(np.array([1.0, 2.0]), np.array([2.0, 3.0]))

    def test_equality_never_dominates(self):
        assert not dominates(np.array([1.0, 2.0]), np.array([1.0, 2.0]))

    def test_incomparable(self):
        assert not dominates(np.array([1.0, 3.0]), np.array([2.0, 2.0]))
        assert not dominates(np.array([2.0, 2.0]), np.array([1.0, 3.0]))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            dominates(np.array([1.0, 2.0]), np.array([1.0, 2.0, 3.0]))

    @given(st.lists(vectors.map(np.array), min_size=3, max_size=3))
    def test_irreflexive_and_transitive(self, triple):
        a, b, c = (v[:2] for v in triple)
        assert not dominates(a, a)
        if dominates(a, b) and dominates(b, c):
            assert dominates(a, c)


class TestParetoFilter:
    def test_known_set(self):
        values = np.array([[1, 3], [2, 2], [3, 1], [2, 3]], dtype=float)
        result = pareto_filter(values)
        assert brute_force_filter(values) == {tuple(r) for r in result}
        assert {tuple(r) for r in result} == {(1, 3), (2, 2), (3, 1)}

    def test_singleton(self):
        np.testing.assert_array_equal(pareto_filter(np.array([[0.0, 0.0]])),
                                      np.array([[0.0, 0.0]]))

    def test_duplicates_collapse(self):
        result = pareto_filter(np.array([[1.0, 1.0], [1.0, 1.0]]))
        assert result.shape == (1, 2)

    def test_empty(self):
        assert pareto_filter(np.empty((0, 2))).shape[0] == 0

    @settings(max_examples=200)
    @given(st.lists(vectors, min_size=1, max_size=12))
    def test_matches_brute_force_and_idempotent(self, raw):
        k = min(len(v) for v in raw)
        values = np.array([v[:k] for v in raw])
        result = pareto_filter(values)
        assert {tuple(r) for r in result} == brute_force_filter(values)
        np.testing.assert_array_equal(pareto_filter(result), result)


class TestArchive:
    def _ev(self, y, it=0):
        return Evaluation(input=np.zeros(1), output=np.asarray(y, dtype=float), iteration=it)

    def test_insert_nondominated(self):
        arch = ParetoArchive([self._ev([1, 3]), self._ev([3, 1])])
        archive_insert(arch, self._ev([2, 2]))
        assert {tuple(v) for v in arch.values} == {(1, 3), (2, 2), (3, 1)}

    def test_dominated_insert_is_noop(self):
        arch = ParetoArchive([self._ev([1, 1])])
        assert not arch.insert(self._ev([2, 2]))
        assert {tuple(v) for v in arch.values} == {(1, 1)}

    def test_dominating_insert_evicts(self):
        arch = ParetoArchive([self._ev([2, 2])])
        assert arch.insert(self._ev([1, 1]))
        assert {tuple(v) for v in arch.values} == {(1, 1)}

    def test_duplicate_collapses_to_first_arrival(self):
        first = self._ev([1, 2], it=1)
        arch = ParetoArchive([first])
        assert not arch.insert(self._ev([1, 2], it=2))
        assert arch.entries[0] is first

    @settings(max_examples=100)
    @given(
        st.lists(vectors, min_size=1, max_size=10),
        st.randoms(use_true_random=False),
    )
    def test_fold_matches_filter_any_order(self, raw, shuffler):
        k = min(len(v) for v in raw)
        values = [v[:k] for v in raw]
        shuffler.shuffle(values)
        arch = ParetoArchive()
        for v in values:
            arch.insert(self._ev(v))
        expected = {tuple(r) for r in pareto_filter(np.array(values))}
        assert {tuple(v) for v in arch.values} == expected


class TestBoxDomain:
    def test_validation(self):
        with pytest.raises(ValueError):
            BoxDomain(np.array([0.0, 1.0]), np.array([1.0, 1.0]))

    def test_sample_and_clip(self):
        dom = BoxDomain(np.array([-1.0, 0.0]), np.array([1.0, 2.0]))
        pts = dom.sample(np.random.default_rng(0), 50)
        assert dom.contains(pts)
        np.testing.assert_array_equal(
            dom.clip(np.array([[5.0, -3.0]])), np.array([[1.0, 0.0]])
        )


class TestEvaluationLog:
    def test_dimension_guard(self):
        log = EvaluationLog()
        log.append(Evaluation(np.zeros(2), np.array([1.0, 2.0])))
        with pytest.raises(ValueError):
            log.append(Evaluation(np.zeros(2), np.array([1.0, 2.0, 3.0])))

    def test_array_views(self):
        log = EvaluationLog(
            [Evaluation(np.array([0.0, 1.0]), np.array([1.0, 2.0]), iteration=i)
             for i in range(3)]
        )
        assert log.inputs.shape == (3, 2)
        assert log.outputs.shape == (3, 2)
