import json

import numpy as np
import pytest

from electrify.analysis import (
    CSV_COLUMNS,
    HealthCurvePoint,
    RouteRatios,
    build_report,
    emit_report,
    health_savings_curve,
    pareto_frontier,
)
from electrify.errors import AllZeroImpacts


def brute_force_frontier(points):
    keep = []
    for p in points:
        dominated = any(
            q is not p
            and q.tco_ratio <= p.tco_ratio
            and q.ghg_ratio <= p.ghg_ratio
            and (q.tco_ratio < p.tco_ratio or q.ghg_ratio < p.ghg_ratio)
            for q in points
        )
        if not dominated:
            keep.append(p.route_id)
    return sorted(keep)


def random_points(rng, n):
    return [
        RouteRatios(f"r{k}", float(t), float(g))
        for k, (t, g) in enumerate(zip(rng.uniform(0.5, 1.5, n), rng.uniform(0.0, 1.0, n)))
    ]


class TestParetoFrontier:
    def test_worked_example(self):
        points = [
            RouteRatios("a", 1.0, 0.5),
            RouteRatios("b", 0.9, 0.6),
            RouteRatios("c", 1.1, 0.7),
        ]
        assert pareto_frontier(points) == ["b", "a"]

    def test_single_point(self):
        assert pareto_frontier([RouteRatios("only", 1.2, 0.3)]) == ["only"]

    def test_duplicates_both_kept(self):
        points = [RouteRatios("x", 1.0, 0.5), RouteRatios("y", 1.0, 0.5)]
        assert sorted(pareto_frontier(points)) == ["x", "y"]

    def test_matches_brute_force_on_random_instances(self):
        rng = np.random.default_rng(123)
        for _ in range(20):
            points = random_points(rng, 200)
            assert sorted(pareto_frontier(points)) == brute_force_frontier(points)

    def test_with_ties_and_duplicates(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            # coarse grid forces many exact ties
            points = [
                RouteRatios(f"r{k}", float(t), float(g))
                for k, (t, g) in enumerate(
                    zip(rng.integers(0, 5, 100) / 4.0, rng.integers(0, 5, 100) / 4.0)
                )
            ]
            assert sorted(pareto_frontier(points)) == brute_force_frontier(points)

    def test_every_loser_is_dominated_by_a_winner(self):
        rng = np.random.default_rng(99)
        points = random_points(rng, 300)
        frontier_ids = set(pareto_frontier(points))
        frontier = [p for p in points if p.route_id in frontier_ids]
        for p in points:
            if p.route_id in frontier_ids:
                continue
            assert any(
                q.tco_ratio <= p.tco_ratio
                and q.ghg_ratio <= p.ghg_ratio
                and (q.tco_ratio < p.tco_ratio or q.ghg_ratio < p.ghg_ratio)
                for q in frontier
            )

    def test_sorted_by_tco_ratio(self):
        rng = np.random.default_rng(5)
        points = random_points(rng, 100)
        result = pareto_frontier(points)
        by_id = {p.route_id: p for p in points}
        ratios = [by_id[rid].tco_ratio for rid in result]
        assert ratios == sorted(ratios)


class TestHealthCurve:
    def test_worked_example(self):
        curve = health_savings_curve({"A": 50.0, "B": 30.0, "C": 20.0})
        assert curve == [
            HealthCurvePoint(1, "A", 50.0),
            HealthCurvePoint(2, "B", 80.0),
            HealthCurvePoint(3, "C", 100.0),
        ]

    def test_single_route(self):
        assert health_savings_curve({"solo": 7.0}) == [HealthCurvePoint(1, "solo", 100.0)]

    def test_all_zero_rejected(self):
        with pytest.raises(AllZeroImpacts):
            health_savings_curve({"a": 0.0, "b": 0.0})

    def test_non_decreasing_reaches_hundred(self):
        rng = np.random.default_rng(1)
        impacts = {f"r{k}": float(v) for k, v in enumerate(rng.uniform(1, 100, 25))}
        curve = health_savings_curve(impacts)
        pcts = [pt.cumulative_savings_pct for pt in curve]
        assert all(b >= a for a, b in zip(pcts, pcts[1:]))
        assert pcts[-1] == pytest.approx(100.0)

    def test_top_half_dominates(self):
        rng = np.random.default_rng(2)
        impacts = {f"r{k}": float(v) for k, v in enumerate(rng.uniform(1, 100, 8))}
        curve = health_savings_curve(impacts)
        assert curve[len(curve) // 2 - 1].cumulative_savings_pct > 50.0

    def test_permutation_invariant(self):
        impacts = {"a": 10.0, "b": 5.0, "c": 30.0, "d": 30.0}
        reordered = dict(reversed(list(impacts.items())))
        a = health_savings_curve(impacts)
        b = health_savings_curve(reordered)
        assert a == b

    def test_ties_broken_by_route_id(self):
        curve = health_savings_curve({"z": 10.0, "a": 10.0})
        assert [pt.route_id for pt in curve] == ["a", "z"]


class TestEmitReport:
    def test_report_round_trip_byte_identical(self, tmp_path, feed, distances, elevations, surrogate_model):
        from electrify.fleet import ChargerSpec, estimate_fleet
        from electrify.gtfs import cluster_trips
        from electrify.physics import BusSpec
        from electrify.valuation import (
            EmissionFactors, HealthParams, RouteValuation, TcoParams,
            fuel_economy, tco_npv_diesel, tco_npv_electric,
        )
        import datetime as dt

        valuations = []
        for rid in ("r201", "r202"):
            fleet = estimate_fleet(
                feed, rid, cluster_trips(feed, rid), surrogate_model, distances, elevations,
                BusSpec(), ChargerSpec(), 15, 11.0, -5.0, dt.date(2020, 3, 2),
            )
            fe = fuel_economy(fleet.route_speed_kmh)
            valuations.append(
                RouteValuation(
                    route_id=rid,
                    short_name=rid[1:],
                    fleet=fleet,
                    fe_mpg=fe,
                    electric=tco_npv_electric(
                        fleet, fleet.annual_energy_kwh, TcoParams(), ChargerSpec(), BusSpec(), EmissionFactors()
                    ),
                    diesel=tco_npv_diesel(fleet, fe, TcoParams(), EmissionFactors(), HealthParams()),
                )
            )
        metadata = {"profile": "boston", "seed": 11}
        first = emit_report(valuations, metadata, tmp_path / "report.json", tmp_path / "report.csv")
        text_first = (tmp_path / "report.json").read_text()
        reparsed = json.loads(text_first)
        assert reparsed == first
        # re-emit from the same inputs: byte identical
        emit_report(valuations, metadata, tmp_path / "report2.json", tmp_path / "report2.csv")
        assert (tmp_path / "report2.json").read_bytes() == (tmp_path / "report.json").read_bytes()
        assert (tmp_path / "report2.csv").read_bytes() == (tmp_path / "report.csv").read_bytes()

        csv_text = (tmp_path / "report.csv").read_text()
        assert csv_text.splitlines()[0] == ",".join(CSV_COLUMNS)
        assert len(csv_text.splitlines()) == 3  # header + 2 routes

    def test_empty_valuations_rejected(self):
        with pytest.raises(ValueError):
            build_report([], {})

    def test_unwritable_path_raises_write_failure(self, tmp_path, feed, distances, elevations, surrogate_model):
        import datetime as dt

        from electrify.errors import WriteFailure
        from electrify.fleet import ChargerSpec, estimate_fleet
        from electrify.gtfs import cluster_trips
        from electrify.physics import BusSpec
        from electrify.valuation import (
            EmissionFactors, HealthParams, RouteValuation, TcoParams,
            fuel_economy, tco_npv_diesel, tco_npv_electric,
        )

        fleet = estimate_fleet(
            feed, "r201", cluster_trips(feed, "r201"), surrogate_model, distances, elevations,
            BusSpec(), ChargerSpec(), 15, 11.0, -5.0, dt.date(2020, 3, 2),
        )
        fe = fuel_economy(fleet.route_speed_kmh)
        valuation = RouteValuation(
            route_id="r201", short_name="201", fleet=fleet, fe_mpg=fe,
            electric=tco_npv_electric(
                fleet, fleet.annual_energy_kwh, TcoParams(), ChargerSpec(), BusSpec(), EmissionFactors()
            ),
            diesel=tco_npv_diesel(fleet, fe, TcoParams(), EmissionFactors(), HealthParams()),
        )
        with pytest.raises(WriteFailure):
            emit_report([valuation], {}, tmp_path / "no_such_dir" / "report.json")
