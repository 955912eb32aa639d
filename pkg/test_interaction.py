#!/usr/bin/env python3
"""Interaction strength estimates and the companion search."""
import math
from functools import lru_cache

import pytest

import hyptrig
import interaction
from config import ExperimentSettings, SearchSettings
from errors import DomainError, IndeterminateError
from geodesics import class_from_word, enumerate_geodesics, enumerate_spectrum
from interaction import (PairResult, asymptotic_experiment, cutoff_rule, estimate_interaction,
                         find_systole_companion, thin_thick_audit, word_candidates)
from surface import build_surface, genus2_dumbbell

SETTINGS = SearchSettings(max_word_length=8, element_budget=200_000, workers=2)
EXPERIMENT = ExperimentSettings(companion_word_length=4)


@lru_cache(maxsize=None)
def dumbbell_surface():
    return build_surface(genus2_dumbbell(0.1, 2.0, 2.0))


@lru_cache(maxsize=None)
def short_report():
    return estimate_interaction(dumbbell_surface(), 2.5, SETTINGS)


@lru_cache(maxsize=None)
def companion():
    return find_systole_companion(dumbbell_surface(), SETTINGS, EXPERIMENT)


@lru_cache(maxsize=None)
def thin_dumbbell(epsilon):
    return build_surface(genus2_dumbbell(epsilon, 2.0, 2.0))


@lru_cache(maxsize=None)
def family_companion(epsilon):
    return find_systole_companion(thin_dumbbell(epsilon), SETTINGS, EXPERIMENT)


def test_cutoff_rule():
    assert cutoff_rule(0.1) == pytest.approx(4 * math.log(10) + 10)
    assert cutoff_rule(0.1, ExperimentSettings(max_cutoff=7.0)) == 7.0
    assert cutoff_rule(0.1, ExperimentSettings(max_cutoff=7.0), capped=False) == pytest.approx(4 * math.log(10) + 10)


def test_pair_ratio():
    group = dumbbell_surface()
    cls = class_from_word(group, group.gluing_words['loop0'])
    assert PairResult(cls, cls, 3, True).ratio == pytest.approx(3 / 4.0)


def test_report_bounds():
    report = short_report()
    assert report.systole == pytest.approx(0.1, abs=1e-9)
    assert report.predicted == pytest.approx(hyptrig.predicted_interaction(0.1))
    assert report.certificate == pytest.approx(400.0)
    assert 0.0 <= report.i_hat <= report.certificate
    assert report.i_hat >= report.i_hat_delta
    assert report.i_hat >= report.i_hat_simple
    assert report.ratio == pytest.approx(report.i_hat / report.predicted)
    assert all(c.primitive for c in report.classes)
    assert report.figure_eight_floor == pytest.approx(1.0 / hyptrig.figure_eight_length(0.1, 2.0, 2.0) ** 2)


def test_report_is_worker_independent():
    single = estimate_interaction(dumbbell_surface(), 2.5, SearchSettings(max_word_length=8,
                                                                          element_budget=200_000, workers=1))
    assert single.i_hat == short_report().i_hat
    assert single.evaluated_pairs == short_report().evaluated_pairs


def test_cutoff_below_twice_systole_rejected():
    with pytest.raises(DomainError):
        estimate_interaction(dumbbell_surface(), 0.15, SETTINGS)


def test_word_candidates_skip_powers():
    candidates = word_candidates(dumbbell_surface(), 8.0, 3, SETTINGS)
    assert candidates
    assert all(c.length <= 8.0 + 1e-9 for c in candidates)
    words = [c.word for c in candidates]
    assert len(words) == len(set(words))


def test_companion_meets_the_systole():
    cls, count = companion()
    assert count in (1, 2)
    assert cls.simple
    assert cls.length <= hyptrig.companion_window(0.1, EXPERIMENT.companion_slack, 2) + 1e-9
    # a curve crossing the collar has length at least twice the collar width
    assert cls.length >= 2.0 * hyptrig.sigma(0.05) * count - 1e-9


def test_companion_pair_realizes_lower_bound():
    group = dumbbell_surface()
    cls, count = companion()
    sys_class = class_from_word(group, group.gluing_words['sep'])
    report = estimate_interaction(group, cls.length, SETTINGS, classes=[sys_class, cls])
    assert report.i_hat >= count / (0.1 * cls.length) - 1e-9
    assert report.i_hat <= report.certificate
    audit = thin_thick_audit(group, report, SETTINGS)
    assert audit.holds
    assert audit.parts[0].part == 'thick'


def test_family_must_decrease():
    family = [(0.1, genus2_dumbbell(0.1)), (0.2, genus2_dumbbell(0.2))]
    with pytest.raises(DomainError):
        asymptotic_experiment(family, SETTINGS, EXPERIMENT)


def test_word_candidates_merge_words_of_one_geodesic():
    group = dumbbell_surface()
    candidates = word_candidates(group, 3.0, 4, SETTINGS)
    separating = [c for c in candidates if abs(c.length - 0.1) < 1e-9]
    assert len(separating) == 1


def test_indeterminate_pairs_are_recorded(monkeypatch):
    group = dumbbell_surface()
    classes = [class_from_word(group, group.gluing_words[name]) for name in ('sep', 'loop0', 'loop1')]

    def indeterminate(group, first, second, settings=None):
        raise IndeterminateError("shared axis", first=first.word, second=second.word)

    monkeypatch.setattr(interaction, 'intersection_number', indeterminate)
    report = estimate_interaction(group, 2.5, SETTINGS, classes=classes)
    assert len(report.indeterminate_pairs) == 3
    assert report.row()['indeterminate_pairs'] == 3
    assert report.i_hat == 0.0
    assert all(report.simple.values())


def test_incomplete_spectrum_is_reported():
    settings = SearchSettings(max_word_length=4, element_budget=200_000, workers=2)
    report = estimate_interaction(dumbbell_surface(), 2.5, settings)
    assert not report.spectrum_complete
    assert report.row()['spectrum_complete'] is False
    assert short_report().spectrum_complete == enumerate_spectrum(dumbbell_surface(), 2.5, SETTINGS).complete


def test_computed_pairs_respect_the_universal_bound():
    report = short_report()
    assert report.pairs
    for pair in report.pairs:
        assert pair.count <= 4.0 / report.systole ** 2 * pair.first.length * pair.second.length + 1e-6


def test_companion_across_the_family():
    for epsilon in (0.2, 0.1, 0.05):
        cls, count = family_companion(epsilon)
        assert count in (1, 2), epsilon
        assert cls.simple
        assert cls.length <= hyptrig.companion_window(epsilon, EXPERIMENT.companion_slack, 2) + 1e-9


def test_asymptotic_rows_record_capped_cutoffs():
    experiment = ExperimentSettings(companion_word_length=4, max_cutoff=3.0)
    family = [(eps, genus2_dumbbell(eps, 2.0, 2.0)) for eps in (0.2, 0.1, 0.05)]
    rows = asymptotic_experiment(family, SETTINGS, experiment)
    assert [r.error for r in rows] == ['', '', '']
    for row in rows:
        assert row.capped
        assert row.rule_cutoff == pytest.approx(cutoff_rule(row.epsilon, experiment, capped=False))
        assert not row.ratio_checked
        # the companion pair alone gives i / (l l_sys) >= 1 / (l_sys l_companion)
        assert row.i_hat >= 1.0 / (row.systole * row.cutoff) - 1e-9
    i_hats = [r.i_hat for r in rows]
    assert i_hats == sorted(i_hats)
    assert i_hats[0] < i_hats[-1]


def test_simple_pairs_carry_the_estimate_on_thin_surfaces():
    group = thin_dumbbell(0.05)
    cls, _ = family_companion(0.05)
    classes = enumerate_geodesics(group, 2.5, SETTINGS) + [cls]
    report = estimate_interaction(group, cls.length, SETTINGS, classes=classes)
    assert report.i_hat > 0
    assert report.i_hat_simple >= 0.9 * report.i_hat


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
