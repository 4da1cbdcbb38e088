"""Transit bus electrification valuation from open schedule data."""

__version__ = "0.1.0"

from .fleet import ChargerSpec, FleetEstimate
from .gtfs import GtfsFeed, Stop, Trip, TripCluster
from .physics import BusSpec, DriveCycle, EnvConditions, HvacModel
from .surrogate import (
    CoordinateDescentElasticNet,
    ElasticNetConfig,
    MonomialFeatures,
    ScenarioDistributions,
    ScenarioSample,
    SurrogateModel,
)
from .valuation import EmissionFactors, HealthParams, RouteValuation, TcoParams

__all__ = [
    "BusSpec",
    "ChargerSpec",
    "CoordinateDescentElasticNet",
    "DriveCycle",
    "ElasticNetConfig",
    "EmissionFactors",
    "EnvConditions",
    "FleetEstimate",
    "GtfsFeed",
    "HealthParams",
    "HvacModel",
    "MonomialFeatures",
    "RouteValuation",
    "ScenarioDistributions",
    "ScenarioSample",
    "Stop",
    "SurrogateModel",
    "TcoParams",
    "Trip",
    "TripCluster",
]
