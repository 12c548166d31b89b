import csv
import random

import pytest
from hypothesis import given, strategies as st

import beescreen
from beescreen.dockrun import BindingMode, DockingResult
from beescreen.errors import ConfigurationError, IncompleteProfileError
from beescreen.screen import (
    APISIMIN,
    MRJP1,
    LigandProfile,
    ScreeningConfig,
    aggregate_profiles,
    best_affinity_profiles,
    filter_modes,
    load_mode_table_csv,
    rank_candidates,
    select_candidates,
    selectivity_delta,
    split_complete,
)

CFG = ScreeningConfig()


def load_fixture_results():
    with open(str(beescreen.mode_table_fixture_path()), newline="") as handle:
        return load_mode_table_csv(handle)


def fixture_oracle_means():
    """Independent oracle: group and average the raw CSV rows directly."""
    sums: dict[tuple[str, str], list[float]] = {}
    with open(str(beescreen.mode_table_fixture_path()), newline="") as handle:
        for row in csv.DictReader(handle):
            key = (row["ligand"], row["receptor"])
            sums.setdefault(key, []).append(float(row["affinity_kcal_mol"]))
    return {key: sum(v) / len(v) for key, v in sums.items()}


def mode(idx, affinity, ub, lb=0.0):
    return BindingMode(idx, affinity, lb, ub)


class TestFilterModes:
    def test_zero_rmsd_mode_retained(self):
        result = DockingResult(MRJP1, "94R", (mode(1, -6.0, 0.0),))
        assert filter_modes(result, CFG).modes == result.modes

    def test_value_just_under_threshold_retained(self):
        result = DockingResult(APISIMIN, "MHQ", (mode(1, -5.4, 0.0), mode(8, -4.7, 3.445)))
        assert len(filter_modes(result, CFG).modes) == 2

    def test_exactly_threshold_excluded(self):
        result = DockingResult(MRJP1, "X", (mode(1, -6.0, 0.0), mode(2, -5.0, 3.5)))
        kept = filter_modes(result, CFG).modes
        assert [m.mode for m in kept] == [1]

    def test_indices_not_renumbered(self):
        result = DockingResult(
            MRJP1, "X", (mode(1, -6.0, 0.0), mode(2, -5.5, 4.0), mode(3, -5.0, 1.0))
        )
        assert [m.mode for m in filter_modes(result, CFG).modes] == [1, 3]

    @given(
        ubs=st.lists(st.floats(0.0, 8.0), min_size=1, max_size=20),
        threshold=st.floats(0.5, 6.0),
    )
    def test_filter_set_equality_property(self, ubs, threshold):
        modes = tuple(mode(i + 1, -6.0, ub) for i, ub in enumerate(ubs))
        cfg = ScreeningConfig(rmsd_ub_max=threshold)
        kept = filter_modes(DockingResult("R", "L", modes), cfg).modes
        assert set(kept) == {m for m in modes if m.rmsd_ub < threshold}


class TestAggregateProfiles:
    def test_vd3_mrjp1_hand_mean(self):
        profiles = {p.ligand_id: p for p in aggregate_profiles(load_fixture_results())}
        assert profiles["VD3"].mean_affinity[MRJP1] == pytest.approx(-6.85)

    def test_control_mrjp1_hand_mean(self):
        profiles = {p.ligand_id: p for p in aggregate_profiles(load_fixture_results())}
        assert profiles["94R"].mean_affinity[MRJP1] == pytest.approx(-5.6667, abs=1e-4)

    def test_single_mode_mean(self):
        profiles = {p.ligand_id: p for p in aggregate_profiles(load_fixture_results())}
        assert profiles["VD3"].mean_affinity[APISIMIN] == pytest.approx(-5.2)
        assert profiles["VD3"].mode_count[APISIMIN] == 1

    def test_all_means_match_independent_oracle(self):
        oracle = fixture_oracle_means()
        for profile in aggregate_profiles(load_fixture_results()):
            for receptor, mean in profile.mean_affinity.items():
                assert mean == pytest.approx(oracle[(profile.ligand_id, receptor)])

    def test_zero_retained_modes_has_no_mean(self):
        results = [
            DockingResult(MRJP1, "L", (mode(1, -6.0, 0.0),)),
            DockingResult(APISIMIN, "L", ()),
        ]
        (profile,) = aggregate_profiles(results)
        assert APISIMIN not in profile.mean_affinity
        assert profile.mode_count[APISIMIN] == 0

    @given(
        affinities=st.lists(st.floats(-9.0, -1.0), min_size=1, max_size=15)
    )
    def test_mean_bounded_property(self, affinities):
        modes = tuple(mode(i + 1, a, 0.0) for i, a in enumerate(affinities))
        (profile,) = aggregate_profiles([DockingResult("R", "L", modes)])
        assert min(affinities) <= profile.mean_affinity["R"] <= max(affinities)

    def test_best_mode_variant(self):
        profiles = {p.ligand_id: p for p in best_affinity_profiles(load_fixture_results())}
        assert profiles["94R"].mean_affinity[MRJP1] == pytest.approx(-6.0)


class TestSelectivityDelta:
    def test_vd3_hand_value(self):
        profiles = {p.ligand_id: p for p in aggregate_profiles(load_fixture_results())}
        assert selectivity_delta(profiles["VD3"], MRJP1, APISIMIN) == pytest.approx(-1.65)

    def test_d2v_hand_value(self):
        profiles = {p.ligand_id: p for p in aggregate_profiles(load_fixture_results())}
        assert selectivity_delta(profiles["D2V"], MRJP1, APISIMIN) == pytest.approx(-1.60)

    def test_equal_means_zero(self):
        p = LigandProfile("L", {MRJP1: -5.0, APISIMIN: -5.0}, {MRJP1: 1, APISIMIN: 1})
        assert selectivity_delta(p, MRJP1, APISIMIN) == 0.0

    def test_antisymmetry(self):
        p = LigandProfile("L", {MRJP1: -6.2, APISIMIN: -5.1}, {MRJP1: 2, APISIMIN: 1})
        assert selectivity_delta(p, MRJP1, APISIMIN) == pytest.approx(
            -selectivity_delta(p, APISIMIN, MRJP1)
        )

    def test_missing_receptor_names_it(self):
        p = LigandProfile("L", {MRJP1: -6.2}, {MRJP1: 2, APISIMIN: 0})
        with pytest.raises(IncompleteProfileError, match=APISIMIN):
            selectivity_delta(p, MRJP1, APISIMIN)


EXPECTED_RANKING = [
    ("VD3", -1.65),
    ("D2V", -1.60),
    ("ERG", -1.10),
    ("MHQ", -1.05),
    ("94R", -0.9667),
    ("CLR", -0.925),
    ("LAN", -0.7667),
    ("DVE", -0.6333),
    ("LNP", -0.40),
]


class TestRankCandidates:
    def test_full_fixture_order_and_deltas(self):
        ranked = rank_candidates(aggregate_profiles(load_fixture_results()))
        assert [p.ligand_id for p in ranked] == [lig for lig, _ in EXPECTED_RANKING]
        for profile, (_, delta) in zip(ranked, EXPECTED_RANKING):
            assert profile.selectivity_delta == pytest.approx(delta, abs=1e-4)

    def test_empty_input(self):
        assert rank_candidates([]) == []

    def test_tie_break_lexicographic(self):
        a = LigandProfile("BBB", {MRJP1: -6.0, APISIMIN: -5.0}, {})
        b = LigandProfile("AAA", {MRJP1: -6.0, APISIMIN: -5.0}, {})
        assert [p.ligand_id for p in rank_candidates([a, b])] == ["AAA", "BBB"]

    def test_permutation_and_shuffle_stability(self):
        profiles = aggregate_profiles(load_fixture_results())
        ranked = rank_candidates(profiles)
        assert sorted(p.ligand_id for p in ranked) == sorted(p.ligand_id for p in profiles)
        rng = random.Random(7)
        for _ in range(5):
            shuffled = list(profiles)
            rng.shuffle(shuffled)
            assert [p.ligand_id for p in rank_candidates(shuffled)] == [
                p.ligand_id for p in ranked
            ]

    def test_uniform_shift_leaves_order_unchanged(self):
        profiles = aggregate_profiles(load_fixture_results())
        shifted = [
            LigandProfile(
                p.ligand_id,
                {r: m + (1.7 if r == MRJP1 else 0.0) for r, m in p.mean_affinity.items()},
                p.mode_count,
            )
            for p in profiles
        ]
        assert [p.ligand_id for p in rank_candidates(shifted)] == [
            p.ligand_id for p in rank_candidates(profiles)
        ]


class TestSelectCandidates:
    def test_fixture_defaults_select_vd3_and_d2v(self):
        profiles = aggregate_profiles(load_fixture_results())
        selected, rationale = select_candidates(profiles, CFG)
        assert set(selected) == {"VD3", "D2V"}
        by_id = {r.ligand_id: r for r in rationale}
        # LAN fails the counter-receptor tolerance, ERG the target margin.
        assert not by_id["LAN"].tolerance_ok
        assert by_id["ERG"].tolerance_ok and not by_id["ERG"].margin_ok
        # CLR sits exactly at the tolerance but misses the margin.
        assert by_id["CLR"].tolerance_ok and not by_id["CLR"].margin_ok

    def test_degenerate_thresholds_select_all_not_weaker(self):
        profiles = aggregate_profiles(load_fixture_results())
        cfg = ScreeningConfig(apisimin_tolerance=float("inf"), mrjp1_margin=0.0)
        selected, _ = select_candidates(profiles, cfg)
        control_mean = next(
            p for p in profiles if p.ligand_id == "94R"
        ).mean_affinity[MRJP1]
        expected = {
            p.ligand_id
            for p in profiles
            if p.ligand_id != "94R" and p.mean_affinity[MRJP1] <= control_mean
        }
        assert set(selected) == expected

    def test_unsatisfiable_margin_selects_nothing(self):
        profiles = aggregate_profiles(load_fixture_results())
        selected, _ = select_candidates(profiles, ScreeningConfig(mrjp1_margin=10.0))
        assert selected == []

    def test_control_never_selected(self):
        profiles = aggregate_profiles(load_fixture_results())
        cfg = ScreeningConfig(apisimin_tolerance=float("inf"), mrjp1_margin=0.0)
        selected, _ = select_candidates(profiles, cfg)
        assert "94R" not in selected

    def test_missing_control_is_configuration_error(self):
        profiles = [
            p for p in aggregate_profiles(load_fixture_results()) if p.ligand_id != "94R"
        ]
        with pytest.raises(ConfigurationError):
            select_candidates(profiles, CFG)

    def test_rationale_reports_numbers(self):
        profiles = aggregate_profiles(load_fixture_results())
        _, rationale = select_candidates(profiles, CFG)
        vd3 = next(r for r in rationale if r.ligand_id == "VD3")
        assert vd3.counter_deviation == pytest.approx(0.5)
        assert vd3.target_advantage == pytest.approx(1.1833, abs=1e-4)


class TestLoadModeTable:
    def test_fixture_group_count(self):
        results = load_fixture_results()
        assert len(results) == 18  # 9 ligands x 2 receptors

    def test_missing_column_rejected(self):
        rows = ["receptor,ligand,mode,affinity_kcal_mol", "MRJP1,X,1,-6.0"]
        with pytest.raises(ValueError):
            load_mode_table_csv(iter(rows))

    def test_split_complete_partition(self):
        profiles = aggregate_profiles(load_fixture_results())
        extra = LigandProfile("ONLY1", {MRJP1: -6.0}, {MRJP1: 1, APISIMIN: 0})
        complete, incomplete = split_complete(profiles + [extra], MRJP1, APISIMIN)
        assert len(complete) == 9
        assert [p.ligand_id for p in incomplete] == ["ONLY1"]
