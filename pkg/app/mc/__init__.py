"""蒙特卡洛估计"""

from .estimates import SUMMARY_HEADER, SampleSummary, estimate_distances, estimate_fourth_moment, summarize, summary_csv
from .sampler import RunConfig, draw_w, sample_w, substream

__all__ = [
    "SUMMARY_HEADER",
    "RunConfig",
    "SampleSummary",
    "draw_w",
    "estimate_distances",
    "estimate_fourth_moment",
    "sample_w",
    "substream",
    "summarize",
    "summary_csv",
]
