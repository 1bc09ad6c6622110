import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from evalfuse import possibility as qp
from evalfuse.possibility import (DistributionError, PossibilityDistribution,
                                  SatisfactionProfile)
from evalfuse.scales import (IMPORTANCE, POSSIBILITY, RELIABILITY, SATISFACTION,
                             SELF_CONFIDENCE, Level, OrdinalScale, ScaleMap,
                             label_identity_map, standard_importance_to_score,
                             standard_otimes, standard_vtilde)

CONF_MAP = label_identity_map(SELF_CONFIDENCE, POSSIBILITY)
IMP_MAP = standard_importance_to_score()
VTILDE = standard_vtilde()
OTIMES = standard_otimes()
S2P = ScaleMap.from_labels(SATISFACTION, POSSIBILITY,
                           {"1": "0", "2": "a", "3": "b", "4": "b", "5": "1"})


def dist(labels: str) -> PossibilityDistribution:
    return PossibilityDistribution.from_labels(SATISFACTION, POSSIBILITY,
                                               tuple(labels))


def interval(lo: str, hi: str) -> PossibilityDistribution:
    return qp.from_interval(SATISFACTION.level(lo), SATISFACTION.level(hi),
                            POSSIBILITY)


def plevel(lab: str) -> Level:
    return POSSIBILITY.level(lab)


def random_dist(rng: random.Random, domain=SATISFACTION,
                codomain=POSSIBILITY) -> PossibilityDistribution:
    return PossibilityDistribution(
        domain, codomain,
        tuple(rng.randrange(len(codomain)) for _ in range(len(domain))))


def random_normalized(rng: random.Random) -> PossibilityDistribution:
    values = [rng.randrange(len(POSSIBILITY)) for _ in range(len(SATISFACTION))]
    values[rng.randrange(len(values))] = len(POSSIBILITY) - 1
    return PossibilityDistribution(SATISFACTION, POSSIBILITY, tuple(values))


class TestFromInterval:
    def test_mid_interval(self):
        assert interval("2", "4").labels() == ("0", "1", "1", "1", "0")

    def test_full_interval_is_unknown(self):
        assert interval("1", "5").labels() == ("1", "1", "1", "1", "1")

    def test_singleton(self):
        assert interval("4", "4").labels() == ("0", "0", "0", "1", "0")

    def test_rejects_empty(self):
        with pytest.raises(DistributionError):
            qp.from_interval(SATISFACTION.level("5"), SATISFACTION.level("2"),
                             POSSIBILITY)


class TestDiscountSelfConfidence:
    def test_opens_up_to_complement(self):
        out = qp.discount_self_confidence(interval("4", "4"),
                                          SELF_CONFIDENCE.level("b"), CONF_MAP)
        assert out.labels() == ("a", "a", "a", "1", "a")

    def test_full_confidence_is_identity(self):
        pi = interval("2", "4")
        out = qp.discount_self_confidence(pi, SELF_CONFIDENCE.level("1"), CONF_MAP)
        assert out.labels() == ("0", "1", "1", "1", "0")

    def test_no_confidence_gives_vacuous(self):
        out = qp.discount_self_confidence(interval("4", "4"),
                                          SELF_CONFIDENCE.level("0"), CONF_MAP)
        assert out.labels() == ("1", "1", "1", "1", "1")

    @given(st.lists(st.integers(0, 3), min_size=5, max_size=5),
           st.integers(0, 3))
    def test_never_decreases(self, values, g):
        pi = PossibilityDistribution(SATISFACTION, POSSIBILITY, tuple(values))
        out = qp.discount_self_confidence(pi, SELF_CONFIDENCE.level(g), CONF_MAP)
        assert all(o >= v for o, v in zip(out.values, pi.values))


class TestSourceWeight:
    def test_weights_from_tabulated_conjunction(self):
        assert qp.source_weight(SELF_CONFIDENCE.level("1"), RELIABILITY.level("s"),
                                OTIMES).label == "b"
        assert qp.source_weight(SELF_CONFIDENCE.level("1"), RELIABILITY.level("1"),
                                OTIMES).label == "1"
        assert qp.source_weight(SELF_CONFIDENCE.level("0"), RELIABILITY.level("1"),
                                OTIMES).label == "0"


class TestFuseDisjunctive:
    def test_learning_row(self):
        sources = [(dist("a111a"), plevel("b")), (dist("11111"), plevel("a")),
                   (dist("aaa1a"), plevel("a")), (dist("01110"), plevel("b"))]
        assert qp.fuse_disjunctive(sources).labels() == ("a", "b", "b", "b", "a")

    def test_single_trusted_source_dominates(self):
        sources = [(dist("00010"), plevel("1")), (dist("11111"), plevel("0")),
                   (dist("11111"), plevel("0")), (dist("11111"), plevel("0"))]
        assert qp.fuse_disjunctive(sources).labels() == ("0", "0", "0", "1", "0")

    def test_single_source_with_top_weight_is_identity(self):
        pi = dist("0ab10")
        assert qp.fuse_disjunctive([(pi, plevel("1"))]) == pi

    def test_empty_list_rejected(self):
        with pytest.raises(DistributionError):
            qp.fuse_disjunctive([])

    def test_commutative_and_ignores_zero_weight(self):
        rng = random.Random(7)
        for _ in range(50):
            sources = [(random_dist(rng), plevel(rng.choice("0ab1")))
                       for _ in range(3)]
            shuffled = list(sources)
            rng.shuffle(shuffled)
            assert qp.fuse_disjunctive(sources) == qp.fuse_disjunctive(shuffled)
            extended = sources + [(random_dist(rng), plevel("0"))]
            assert qp.fuse_disjunctive(extended) == qp.fuse_disjunctive(sources)

    def test_monotone_in_weights(self):
        rng = random.Random(8)
        for _ in range(50):
            sources = [(random_dist(rng), POSSIBILITY.level(rng.randrange(4)))
                       for _ in range(3)]
            k = rng.randrange(3)
            pi, w = sources[k]
            if w.index == 3:
                continue
            raised = list(sources)
            raised[k] = (pi, POSSIBILITY.level(w.index + 1))
            low = qp.fuse_disjunctive(sources).values
            high = qp.fuse_disjunctive(raised).values
            assert all(a <= b for a, b in zip(low, high))


class TestFuseConjunctiveMin:
    def test_top_weights_give_pointwise_min(self):
        out = qp.fuse_conjunctive_min([(dist("0ab11"), plevel("1")),
                                       (dist("1b0b1"), plevel("1"))])
        assert out.labels() == ("0", "a", "0", "b", "1")

    def test_single_source_top_weight_identity(self):
        pi = dist("ab011")
        assert qp.fuse_conjunctive_min([(pi, plevel("1"))]) == pi

    def test_disjoint_crisp_sources_conflict_to_bottom(self):
        out = qp.fuse_conjunctive_min([(interval("1", "2"), plevel("1")),
                                       (interval("4", "5"), plevel("1"))])
        assert out.labels() == ("0", "0", "0", "0", "0")


class TestNormalize:
    def test_shift_lear_row(self):
        assert qp.normalize(dist("abbba")).labels() == ("b", "1", "1", "1", "b")

    def test_shift_sparse_row(self):
        assert qp.normalize(dist("0a0a0")).labels() == ("b", "1", "b", "1", "b")

    def test_already_normalized_unchanged(self):
        pi = dist("b0001")
        assert qp.normalize(pi) == pi

    def test_idempotent(self):
        rng = random.Random(9)
        for _ in range(50):
            once = qp.normalize(random_dist(rng))
            assert qp.normalize(once) == once
            assert once.is_normalized()

    def test_preserve_bottom_keeps_impossible_scores(self):
        out = qp.normalize(dist("0a0a0"), "preserve-bottom")
        assert out.labels() == ("0", "1", "0", "1", "0")

    def test_preserve_bottom_rejects_all_bottom(self):
        with pytest.raises(DistributionError):
            qp.normalize(dist("00000"), "preserve-bottom")

    def test_shift_lifts_all_bottom_to_vacuous(self):
        assert qp.normalize(dist("00000")).labels() == ("1", "1", "1", "1", "1")


class TestHeight:
    def test_crisp_has_top_height(self):
        assert qp.height(interval("2", "3")).label == "1"

    def test_uniform_row(self):
        assert qp.height(dist("aaaaa")).label == "a"

    def test_all_bottom(self):
        assert qp.height(dist("00000")).label == "0"


def agg_crisp(score_labels, importance_labels, variant="lift"):
    scores = [SATISFACTION.level(s) for s in score_labels]
    imps = [IMPORTANCE.level(b) for b in importance_labels]
    return qp.aggregate_crisp(scores, imps, variant, VTILDE, IMP_MAP).label


class TestAggregateCrisp:
    def test_lift_never_lowers(self):
        assert agg_crisp("444444", ["g", "e", "e", "1", "g", "1"]) == "4"

    def test_lift_identity_importances(self):
        assert agg_crisp("111111", ["1"] * 6) == "1"

    def test_threshold_variant(self):
        assert agg_crisp("4", ["g"], "threshold") == "5"
        assert agg_crisp("3", ["g"], "threshold") == "3"

    def test_empty_rejected(self):
        with pytest.raises(DistributionError):
            qp.aggregate_crisp([], [], "lift", VTILDE, IMP_MAP)

    def test_monotone_in_each_score(self):
        rng = random.Random(10)
        for _ in range(100):
            scores = [rng.randrange(5) for _ in range(4)]
            imps = [IMPORTANCE.level(rng.randrange(5)) for _ in range(4)]
            k = rng.randrange(4)
            if scores[k] == 4:
                continue
            raised = list(scores)
            raised[k] += 1
            low = qp.aggregate_crisp([SATISFACTION.level(s) for s in scores],
                                     imps, "lift", VTILDE, IMP_MAP)
            high = qp.aggregate_crisp([SATISFACTION.level(s) for s in raised],
                                      imps, "lift", VTILDE, IMP_MAP)
            assert low <= high


class TestAggregateExtension:
    def test_min_pins_two_criteria(self):
        pis = [dist("01000"), dist("00a10")]
        imps = [IMPORTANCE.level("1"), IMPORTANCE.level("1")]
        out = qp.aggregate_extension(pis, imps, "lift", VTILDE, IMP_MAP)
        assert out.labels() == ("0", "1", "0", "0", "0")

    def test_crisp_singletons_reduce_to_crisp_aggregation(self):
        rng = random.Random(11)
        for _ in range(500):
            m = rng.randrange(1, 4)
            scores = [rng.randrange(5) for _ in range(m)]
            imps = [IMPORTANCE.level(rng.randrange(5)) for _ in range(m)]
            pis = [qp.from_interval(SATISFACTION.level(s), SATISFACTION.level(s),
                                    POSSIBILITY) for s in scores]
            out = qp.aggregate_extension(pis, imps, "lift", VTILDE, IMP_MAP)
            expected = qp.aggregate_crisp([SATISFACTION.level(s) for s in scores],
                                          imps, "lift", VTILDE, IMP_MAP)
            assert out.value(expected).label == "1"
            assert sum(1 for v in out.values if v > 0) == 1

    def test_output_normalized_when_inputs_are(self):
        rng = random.Random(12)
        for _ in range(100):
            m = rng.randrange(1, 4)
            pis = [random_normalized(rng) for _ in range(m)]
            imps = [IMPORTANCE.level(rng.randrange(5)) for _ in range(m)]
            out = qp.aggregate_extension(pis, imps, "lift", VTILDE, IMP_MAP)
            assert out.is_normalized()


class TestBuildProfile:
    def test_fully_important(self):
        p = qp.build_profile(IMPORTANCE.level("1"), SATISFACTION, IMP_MAP)
        assert p.values == (0, 1, 2, 3, 4)

    def test_strong_importance_floors_at_two(self):
        p = qp.build_profile(IMPORTANCE.level("g"), SATISFACTION, IMP_MAP)
        assert p.values == (1, 1, 2, 3, 4)

    def test_irrelevant_criterion_always_satisfied(self):
        p = qp.build_profile(IMPORTANCE.level("0"), SATISFACTION, IMP_MAP)
        assert p.values == (4, 4, 4, 4, 4)

    def test_profiles_are_monotone(self):
        with pytest.raises(DistributionError):
            SatisfactionProfile(SATISFACTION, (3, 1, 2, 3, 4))


def full_profile():
    return SatisfactionProfile(SATISFACTION, (4, 4, 4, 4, 4))


class TestMatching:
    def test_top_profiles_match_fully(self):
        rng = random.Random(13)
        pis = [random_normalized(rng) for _ in range(3)]
        profiles = [full_profile() for _ in range(3)]
        assert qp.match_certainty(profiles, pis, S2P).label == "1"
        assert qp.match_possibility(profiles, pis, S2P).label == "1"

    def test_crisp_singletons_read_off_profile(self):
        rng = random.Random(14)
        for _ in range(50):
            m = rng.randrange(1, 4)
            scores = [rng.randrange(5) for _ in range(m)]
            profiles = [qp.build_profile(IMPORTANCE.level(rng.randrange(5)),
                                         SATISFACTION, IMP_MAP) for _ in range(m)]
            pis = [qp.from_interval(SATISFACTION.level(s), SATISFACTION.level(s),
                                    POSSIBILITY) for s in scores]
            expected = min(S2P.apply(SATISFACTION.level(mu.values[s])).index
                           for mu, s in zip(profiles, scores))
            assert qp.match_certainty(profiles, pis, S2P).index == expected
            assert qp.match_possibility(profiles, pis, S2P).index == expected

    def test_certainty_requires_normalized(self):
        profiles = [full_profile()]
        with pytest.raises(DistributionError):
            qp.match_certainty(profiles, [dist("0ab00")], S2P)

    def test_certainty_never_exceeds_possibility(self):
        rng = random.Random(15)
        for _ in range(500):
            m = rng.randrange(1, 4)
            profiles = [qp.build_profile(IMPORTANCE.level(rng.randrange(5)),
                                         SATISFACTION, IMP_MAP) for _ in range(m)]
            pis = [random_normalized(rng) for _ in range(m)]
            cert = qp.match_certainty(profiles, pis, S2P)
            poss = qp.match_possibility(profiles, pis, S2P)
            assert cert.index <= poss.index


class TestRank:
    def test_equal_normalized_distributions_fully_possibly_dominate(self):
        rng = random.Random(16)
        for _ in range(20):
            pi = random_normalized(rng)
            poss, _ = qp.rank(pi, pi)
            assert poss.label == "1"

    def test_crisp_five_dominates_crisp_three(self):
        poss, nec = qp.rank(interval("5", "5"), interval("3", "3"))
        assert (poss.label, nec.label) == ("1", "1")

    def test_crisp_three_never_dominates_crisp_five(self):
        poss, nec = qp.rank(interval("3", "3"), interval("5", "5"))
        assert (poss.label, nec.label) == ("0", "0")


class TestCommutation:
    """Conjunctive fusion and value-side weighted-min aggregation commute.

    Fusing experts per criterion and then intersecting the criteria gives the
    same distribution as aggregating per expert first and fusing the global
    views, provided fusion weights are per expert and importances act on the
    possibility values.
    """

    def _random_problem(self, rng):
        n_experts = rng.randrange(1, 4)
        n_criteria = rng.randrange(1, 4)
        grid = [[random_dist(rng) for _ in range(n_experts)]
                for _ in range(n_criteria)]
        weights = [POSSIBILITY.level(rng.randrange(4)) for _ in range(n_experts)]
        floors = [POSSIBILITY.level(rng.randrange(4)) for _ in range(n_criteria)]
        return grid, weights, floors

    def test_fuse_then_aggregate_equals_aggregate_then_fuse(self):
        rng = random.Random(17)
        for _ in range(100):
            grid, weights, floors = self._random_problem(rng)
            fused = [qp.fuse_conjunctive_min(list(zip(row, weights)))
                     for row in grid]
            path_a = qp.aggregate_pointwise_min(fused, floors)
            per_expert = [qp.aggregate_pointwise_min([row[j] for row in grid],
                                                     floors)
                          for j in range(len(weights))]
            path_b = qp.fuse_conjunctive_min(list(zip(per_expert, weights)))
            assert path_a == path_b

    def test_extension_aggregation_does_not_commute_with_min_fusion(self):
        # the score-side reading genuinely fails: two experts whose opinions
        # cross over two criteria lose the cross-criterion linkage when each
        # one aggregates first
        e1 = [interval("1", "2"), interval("2", "2")]
        e2 = [interval("2", "2"), interval("1", "2")]
        top = plevel("1")
        imps = [IMPORTANCE.level("1")] * 2
        fused = [qp.fuse_conjunctive_min([(a, top), (b, top)])
                 for a, b in zip(e1, e2)]
        path_a = qp.aggregate_extension(fused, imps, "lift", VTILDE, IMP_MAP)
        per_expert = [qp.aggregate_extension(list(row), imps, "lift", VTILDE, IMP_MAP)
                      for row in (e1, e2)]
        path_b = qp.fuse_conjunctive_min([(per_expert[0], top),
                                          (per_expert[1], top)])
        assert path_a != path_b
        assert path_a.labels() == ("0", "1", "0", "0", "0")
        assert path_b.labels() == ("1", "1", "0", "0", "0")
