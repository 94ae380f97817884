"""Survey-style ingestion: from raw household records to cohort reports.

The pipeline runs in five small stages:

1. read a CSV extract whose column names are declared in a config file
   (household-level sums of rental, capital-investment, and private-pension
   income, plus adult/child counts, a currency code, and a group label);
2. convert each household's total to the common unit with configured
   exchange rates;
3. equivalize by the modified OECD scale: weight 1 for the head, 0.5 per
   further adult, 0.3 per child (weights configurable);
4. split sizes into n_T (all records of the group) and n_P (records with
   strictly positive equivalized income) and keep only the positive part
   for estimation;
5. compute every inequality index per group and rank the groups (rank 1 =
   lowest index, ties broken by label).

Groups without a single positive income are reported as undefined rather
than silently dropped.  The config file is INI-style, read with the
standard library parser; currency codes keep their case.
"""
from __future__ import annotations

import configparser
import csv
from dataclasses import dataclass, field
from math import isfinite

from .empirical import (DegenerateSampleError, IndexReport, Sample,
                        csv_cell, full_report, make_sample, report_csv_header)

__all__ = [
    "PipelineError", "HouseholdRecord", "PipelineConfig", "load_config",
    "read_records", "equivalized_income", "Cohort", "build_cohorts",
    "GroupReport", "cohort_reports", "report_table_csv",
]

_LOGICAL_COLUMNS = ("group", "currency", "rental", "capital", "pension",
                    "adults", "children")


class PipelineError(ValueError):
    """Bad input data or configuration for the survey pipeline."""


@dataclass(frozen=True)
class HouseholdRecord:
    """One household: income components in original currency, plus sizes."""

    group: str
    currency: str
    rental: float
    capital: float
    pension: float
    adults: int
    children: int


@dataclass(frozen=True)
class PipelineConfig:
    """Column mapping, exchange rates, and equivalence-scale weights."""

    columns: dict[str, str]
    exchange_rates: dict[str, float]
    head_weight: float = 1.0
    other_adult_weight: float = 0.5
    child_weight: float = 0.3


def load_config(path: str) -> PipelineConfig:
    """Read an INI config with [columns], [exchange_rates], optional [weights]."""
    parser = configparser.ConfigParser()
    parser.optionxform = str  # currency codes are case-sensitive
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise PipelineError(f"cannot read config {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise PipelineError(f"malformed config {path!r}: {exc}") from exc

    if not parser.has_section("columns"):
        raise PipelineError(f"config {path!r} lacks a [columns] section")
    columns = {}
    for key in _LOGICAL_COLUMNS:
        if not parser.has_option("columns", key):
            raise PipelineError(f"config {path!r}: [columns] must map {key!r}")
        columns[key] = parser.get("columns", key).strip()

    if not parser.has_section("exchange_rates"):
        raise PipelineError(f"config {path!r} lacks an [exchange_rates] section")
    rates = {}
    for code in parser.options("exchange_rates"):
        try:
            rate = float(parser.get("exchange_rates", code))
        except ValueError:
            raise PipelineError(
                f"config {path!r}: exchange rate for {code!r} is not a number") from None
        if not (isfinite(rate) and rate > 0.0):
            raise PipelineError(
                f"config {path!r}: exchange rate for {code!r} must be positive")
        rates[code] = rate
    if not rates:
        raise PipelineError(f"config {path!r}: [exchange_rates] is empty")

    weights = {"head": 1.0, "other_adult": 0.5, "child": 0.3}
    if parser.has_section("weights"):
        for key in parser.options("weights"):
            if key not in weights:
                raise PipelineError(
                    f"config {path!r}: unknown weight {key!r} "
                    f"(expected head, other_adult, child)")
            weights[key] = float(parser.get("weights", key))
    if weights["head"] <= 0.0 or weights["other_adult"] < 0.0 or weights["child"] < 0.0:
        raise PipelineError(f"config {path!r}: implausible equivalence weights")

    return PipelineConfig(columns=columns, exchange_rates=rates,
                          head_weight=weights["head"],
                          other_adult_weight=weights["other_adult"],
                          child_weight=weights["child"])


def read_records(path: str, config: PipelineConfig) -> list[HouseholdRecord]:
    """Load household records from CSV, validating headers and cell values."""
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise PipelineError(f"cannot read data {path!r}: {exc}") from exc
    with handle:
        reader = csv.DictReader(handle)
        headers = reader.fieldnames or []
        for logical, name in config.columns.items():
            if name not in headers:
                raise PipelineError(
                    f"data {path!r}: missing column {name!r} (mapped from {logical!r})")
        records = []
        for lineno, row in enumerate(reader, start=2):
            records.append(_parse_row(row, config, path, lineno))
    if not records:
        raise PipelineError(f"data {path!r}: no records")
    return records


def _parse_row(row: dict, config: PipelineConfig, path: str,
               lineno: int) -> HouseholdRecord:
    cols = config.columns

    def cell(logical: str) -> str:
        value = row.get(cols[logical])
        if value is None:
            raise PipelineError(f"data {path!r} line {lineno}: short row")
        return value.strip()

    def money(logical: str) -> float:
        raw = cell(logical)
        try:
            value = float(raw)
        except ValueError:
            raise PipelineError(
                f"data {path!r} line {lineno}: {cols[logical]!r} "
                f"is not a number: {raw!r}") from None
        if not isfinite(value) or value < 0.0:
            raise PipelineError(
                f"data {path!r} line {lineno}: {cols[logical]!r} "
                f"must be finite and >= 0, got {raw!r}")
        return value

    def count(logical: str, minimum: int) -> int:
        raw = cell(logical)
        try:
            value = int(raw)
        except ValueError:
            raise PipelineError(
                f"data {path!r} line {lineno}: {cols[logical]!r} "
                f"is not an integer: {raw!r}") from None
        if value < minimum:
            raise PipelineError(
                f"data {path!r} line {lineno}: {cols[logical]!r} "
                f"must be >= {minimum}, got {value}")
        return value

    group = cell("group")
    if not group:
        raise PipelineError(f"data {path!r} line {lineno}: empty group label")
    return HouseholdRecord(
        group=group,
        currency=cell("currency"),
        rental=money("rental"),
        capital=money("capital"),
        pension=money("pension"),
        adults=count("adults", 1),
        children=count("children", 0),
    )


def equivalized_income(record: HouseholdRecord, config: PipelineConfig) -> float:
    """Common-currency household income per modified-OECD equivalent adult."""
    rate = config.exchange_rates.get(record.currency)
    if rate is None:
        known = ", ".join(sorted(config.exchange_rates))
        raise PipelineError(
            f"unknown currency {record.currency!r} (configured: {known})")
    weight = (config.head_weight
              + config.other_adult_weight * (record.adults - 1)
              + config.child_weight * record.children)
    if weight <= 0.0:
        raise PipelineError(
            f"household weight {weight} must be positive "
            f"(adults={record.adults}, children={record.children})")
    total = record.rental + record.capital + record.pension
    return total * rate / weight


@dataclass(frozen=True)
class Cohort:
    """One group's equivalized incomes, split into total and positive counts."""

    label: str
    n_T: int
    positive_incomes: tuple[float, ...]

    @property
    def n_P(self) -> int:
        return len(self.positive_incomes)

    def sample(self) -> Sample | None:
        if not self.positive_incomes:
            return None
        return make_sample(self.positive_incomes)


def build_cohorts(records: list[HouseholdRecord],
                  config: PipelineConfig) -> list[Cohort]:
    """Group records by label, preserving first-appearance order."""
    totals: dict[str, int] = {}
    positives: dict[str, list[float]] = {}
    for record in records:
        totals[record.group] = totals.get(record.group, 0) + 1
        income = equivalized_income(record, config)
        if income > 0.0:
            positives.setdefault(record.group, []).append(income)
    return [Cohort(label=g, n_T=totals[g],
                   positive_incomes=tuple(positives.get(g, ())))
            for g in totals]


@dataclass(frozen=True)
class GroupReport:
    """A cohort's index report (None if undefined) plus its ranks."""

    label: str
    n_T: int
    n_P: int
    report: IndexReport | None
    ranks: dict[int, int] = field(default_factory=dict)
    note: str = ""


def cohort_reports(cohorts: list[Cohort],
                   strategies: tuple[int, ...] = (1, 2, 3)) -> list[GroupReport]:
    """Index reports per cohort plus per-strategy ranks (1 = lowest index).

    Cohorts whose indices cannot be computed are kept in the table with a
    diagnostic note and excluded from the rankings.
    """
    for k in strategies:
        if k not in (1, 2, 3):
            raise ValueError(f"strategies must be a subset of {{1, 2, 3}}, got {k!r}")
    rows: list[GroupReport] = []
    for cohort in cohorts:
        sample = cohort.sample()
        if sample is None:
            rows.append(GroupReport(cohort.label, cohort.n_T, 0, None,
                                    note="no positive incomes"))
            continue
        try:
            report = full_report(sample, n_total=cohort.n_T)
        except DegenerateSampleError as exc:
            rows.append(GroupReport(cohort.label, cohort.n_T, cohort.n_P, None,
                                    note=str(exc)))
            continue
        rows.append(GroupReport(cohort.label, cohort.n_T, cohort.n_P, report))

    defined = [row for row in rows if row.report is not None]
    for k in strategies:
        key = {1: "psi1", 2: "psi2", 3: "psi3"}[k]
        order = sorted(defined, key=lambda r: (getattr(r.report, key), r.label))
        for position, row in enumerate(order, start=1):
            row.ranks[k] = position
    return rows


def report_table_csv(rows: list[GroupReport], precision: int = 4,
                     strategies: tuple[int, ...] = (1, 2, 3)) -> str:
    """Render cohort reports as CSV with rank columns appended."""
    header = report_csv_header() + "".join(f",rank{k}" for k in strategies)
    lines = [header]
    for row in rows:
        if row.report is None:
            cells = [csv_cell(row.label), "NA", "NA", str(row.n_T), str(row.n_P)]
            cells.extend(["NA"] * 7)
            cells.extend(["NA"] * len(strategies))
        else:
            r = row.report

            def f(x: float) -> str:
                return f"{x:.{precision}f}"

            cells = [csv_cell(row.label), f(r.mean), f(r.median), str(r.n_T), str(r.n_P),
                     f(r.gini), f(r.zenga), f(r.dg), f(r.g2),
                     f(r.psi1), f(r.psi2), f(r.psi3)]
            cells.extend(str(row.ranks[k]) for k in strategies)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
