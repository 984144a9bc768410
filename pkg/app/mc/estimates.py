"""基于样本的矩与距离估计"""

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.distances.empirical import empirical_kolmogorov, empirical_wasserstein
from app.mc.sampler import RunConfig, sample_w
from app.model.spec import UStatisticSpec
from app.utils.logger import logger
from app.utils.serialize import format_decimal

SUMMARY_HEADER = ["seed", "m", "mean", "var", "m4", "dk_est", "dk_band", "dw_est"]


def estimate_fourth_moment(
    spec: UStatisticSpec, config: RunConfig, samples: Optional[np.ndarray] = None
) -> tuple[float, float]:
    """E[W⁴] 的样本均值与标准误"""
    samples = sample_w(spec, config) if samples is None else samples
    fourth = samples**4
    m = fourth.size
    spread = float(fourth.std(ddof=1)) if m > 1 else 0.0
    return float(fourth.mean()), spread / math.sqrt(m)


def estimate_distances(
    spec: UStatisticSpec, config: RunConfig, samples: Optional[np.ndarray] = None
) -> tuple[float, float, float]:
    """(d_K 估计, DKW 半径, d_W 估计)"""
    samples = sample_w(spec, config) if samples is None else samples
    dk, band = empirical_kolmogorov(samples, config.delta)
    return dk, band, empirical_wasserstein(samples)


@dataclass(frozen=True)
class SampleSummary:
    seed: int
    m: int
    mean: float
    var: float
    m4: float
    m4_stderr: float
    dk_est: float
    dk_band: float
    dw_est: float

    def csv_row(self) -> list:
        return [
            self.seed,
            self.m,
            format_decimal(self.mean),
            format_decimal(self.var),
            format_decimal(self.m4),
            format_decimal(self.dk_est),
            format_decimal(self.dk_band),
            format_decimal(self.dw_est),
        ]

    def to_dict(self) -> dict:
        doc = dict(zip(SUMMARY_HEADER, self.csv_row()))
        doc["m4_stderr"] = format_decimal(self.m4_stderr)
        return doc


def summarize(spec: UStatisticSpec, config: RunConfig, samples: Optional[np.ndarray] = None) -> SampleSummary:
    samples = sample_w(spec, config) if samples is None else samples
    m4, stderr = estimate_fourth_moment(spec, config, samples)
    dk, band, dw = estimate_distances(spec, config, samples)
    summary = SampleSummary(
        seed=config.seed,
        m=int(samples.size),
        mean=float(samples.mean()),
        var=float(samples.var(ddof=1)) if samples.size > 1 else 0.0,
        m4=m4,
        m4_stderr=stderr,
        dk_est=dk,
        dk_band=band,
        dw_est=dw,
    )
    logger.info(f"{spec.label()}: E[W⁴]≈{m4:.6g}±{stderr:.2g}, d_K≈{dk:.6g}±{band:.2g}, d_W≈{dw:.6g}")
    return summary


def summary_csv(summaries: list[SampleSummary]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SUMMARY_HEADER)
    for summary in summaries:
        writer.writerow(summary.csv_row())
    return buffer.getvalue()
