"""Deterministic desk-scale stand-in for a farmer survey dataset.

20 columns (12 continuous with one to three modes, 8 discrete with two to
six categories), planted correlations through shared latent factors and a
``farmer_category`` target that is a thresholded score of four columns with
about 4% label noise.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from polsynth import rng as _rng
from polsynth.dataset import Column, Kind, Schema, Table, write_schema, write_table

N_ROWS = 5000
TARGET = "farmer_category"
LABEL_NOISE = 0.04

PII = ("farmer_age", "household_income", "plot_latitude", "plot_longitude", "land_value",
       "herd_size", "farm_size_ha", "gender", "education", "household_size")
PUBLIC = ("rainfall_mm", "district", TARGET)

CONTINUOUS = ("farmer_age", "household_income", "plot_latitude", "plot_longitude", "land_value",
              "herd_size", "farm_size_ha", "milk_yield", "feed_cost", "vaccination_cost",
              "rainfall_mm", "market_distance_km")
DISCRETE = ("gender", "education", "household_size", "cattle_breed", "coop_member", "credit_access",
            "district", TARGET)

POLICY_TEXT = """\
The farmer can provide data to land owners, potato processors, the government, paying authorities, etc.
Unless otherwise agreed in the contract, the data originator can transmit this data to another data user.
Contracts must not be amended without the prior consent of the data originator.
Parties may not use, process, or share data without the consent of the data originator.
Data cannot be owned in the same way as physical assets.
The data originator can store data in a primary location, in a data platform, or cloud-based storage platforms.
Public weather records, market information and the farm classification may be published for the benefit of the farming community.
Personal data identifying the farmer shall be processed only for the purposes agreed in the contract.
"""

SENSITIVITY_CONFIG = """\
[tags]
PII = personal data, data originator
public = public weather, market information, farm classification
"""


def _mixture(gen, n, weights, means, stds):
    comp = gen.choice(len(weights), size=n, p=weights)
    return np.asarray(means)[comp] + np.asarray(stds)[comp] * gen.standard_normal(n)


def _categorize(score, cuts, labels):
    return np.asarray(labels, dtype=object)[np.searchsorted(np.asarray(cuts), score)]


def generate(seed: int = 1, n: int = N_ROWS) -> Table:
    gen = _rng.substream(seed, _rng.BENCHMARK)
    wealth = gen.standard_normal(n)
    experience = gen.standard_normal(n)
    location = gen.standard_normal(n)
    dairy = gen.standard_normal(n)

    farmer_age = 44 + 9 * (0.8 * experience + 0.6 * gen.standard_normal(n))
    farm_size = np.exp(1.2 + 0.6 * wealth + 0.35 * gen.standard_normal(n))
    herd_size = np.clip(np.round(np.exp(1.6 + 0.5 * wealth + 0.3 * dairy + 0.3 * gen.standard_normal(n)), 1), 1, None)
    household_income = 1800 + 700 * (0.8 * wealth + 0.3 * dairy + 0.5 * gen.standard_normal(n))
    land_value = _mixture(gen, n, [0.6, 0.4], [9.0, 12.0], [0.8, 0.9]) + 0.5 * wealth
    plot_lat = np.where(location > 0.3, -1.0 + 0.15 * gen.standard_normal(n), -3.2 + 0.2 * gen.standard_normal(n))
    plot_lon = np.where(location > 0.3, 36.8 + 0.2 * gen.standard_normal(n), 35.1 + 0.25 * gen.standard_normal(n))
    rainfall = _mixture(gen, n, [0.5, 0.3, 0.2], [650, 950, 1300], [80, 90, 120]) + 60 * location
    market_distance = np.abs(12 + 6 * (-0.6 * location + 0.8 * gen.standard_normal(n)))
    milk_yield = _mixture(gen, n, [0.55, 0.45], [4.0, 11.0], [1.2, 2.0]) + 1.5 * dairy
    feed_cost = 30 + 12 * (0.7 * dairy + 0.4 * wealth + 0.5 * gen.standard_normal(n))
    vaccination_cost = _mixture(gen, n, [0.7, 0.3], [5.0, 14.0], [1.0, 2.5]) + 0.8 * dairy

    gender = np.where(gen.random(n) < 0.7, "M", "F").astype(object)
    education = _categorize(0.7 * wealth + 0.3 * experience + 0.6 * gen.standard_normal(n),
                            [-0.6, 0.6, 1.4], ["none", "primary", "secondary", "tertiary"])
    household_size = _categorize(0.5 * experience + 0.8 * gen.standard_normal(n),
                                 [-1.2, -0.5, 0.2, 0.9, 1.6], ["1", "2", "3", "4", "5", "6"])
    cattle_breed = _categorize(0.9 * dairy + 0.45 * gen.standard_normal(n), [-0.2, 1.0],
                               ["local", "crossbreed", "exotic"])
    coop_member = np.where(0.5 * wealth + 0.3 * location + gen.standard_normal(n) > 0.4, "yes", "no").astype(object)
    credit_access = np.where(0.8 * wealth + 0.6 * gen.standard_normal(n) > 0.5, "yes", "no").astype(object)
    district = _categorize(location + 0.35 * gen.standard_normal(n), [-1.0, -0.2, 0.3, 1.1],
                           ["Kajiado", "Narok", "Machakos", "Nakuru", "Kiambu"])

    # planted target: thresholded score of four columns, then label noise
    z = lambda v: (v - v.mean()) / v.std()  # noqa: E731
    score = 0.9 * z(np.log(farm_size)) + 0.8 * z(herd_size) + 0.7 * z(household_income) \
        + 0.8 * (credit_access == "yes")
    target = _categorize(score, [np.median(score)], ["smallholder", "commercial"])
    flip = gen.random(n) < LABEL_NOISE
    target = np.where(flip, np.where(target == "commercial", "smallholder", "commercial"), target).astype(object)

    cols = {
        "farmer_age": np.round(farmer_age, 1), "household_income": np.round(household_income, 2),
        "plot_latitude": np.round(plot_lat, 5), "plot_longitude": np.round(plot_lon, 5),
        "land_value": np.round(land_value, 4), "herd_size": herd_size,
        "farm_size_ha": np.round(farm_size, 3), "milk_yield": np.round(milk_yield, 2),
        "feed_cost": np.round(feed_cost, 2), "vaccination_cost": np.round(vaccination_cost, 2),
        "rainfall_mm": np.round(rainfall, 1), "market_distance_km": np.round(market_distance, 2),
        "gender": gender, "education": education, "household_size": household_size,
        "cattle_breed": cattle_breed, "coop_member": coop_member, "credit_access": credit_access,
        "district": district, TARGET: target,
    }
    return Table(schema(), cols)


def schema() -> Schema:
    cols = []
    for name in CONTINUOUS + DISCRETE:
        tags = {"PII"} if name in PII else {"public"} if name in PUBLIC else set()
        kind = Kind.CONTINUOUS if name in CONTINUOUS else Kind.DISCRETE
        cols.append(Column(name, kind, frozenset(tags)))
    return Schema(tuple(cols))


def write_benchmark(out_dir, seed: int = 1, header_line: str | None = None) -> dict:
    """Write data.csv, schema.csv, policy.txt and sensitivity.cfg into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"data": out / "data.csv", "schema": out / "schema.csv",
             "policy": out / "policy.txt", "sensitivity_config": out / "sensitivity.cfg"}
    write_table(generate(seed), paths["data"], header_line)
    write_schema(schema(), paths["schema"], header_line)
    paths["policy"].write_text(POLICY_TEXT, encoding="utf-8")
    cfg_text = (header_line.rstrip("\n") + "\n" if header_line else "") + SENSITIVITY_CONFIG
    paths["sensitivity_config"].write_text(cfg_text, encoding="utf-8")
    return paths
