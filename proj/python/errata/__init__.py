"""Python bindings for the errata library."""

from ._errata import (
    ErrataError,
    align,
    analyze_corpus,
    choose_and_run,
    classify_pair,
    damerau_distance,
    delta,
    generate_bank,
    paired_t,
    replay,
    score_reading,
    score_writing,
    shapiro_wilk,
    summarize_study,
    wilcoxon_signed_rank,
)

__all__ = [
    "ErrataError",
    "align",
    "analyze_corpus",
    "choose_and_run",
    "classify_pair",
    "damerau_distance",
    "delta",
    "generate_bank",
    "paired_t",
    "replay",
    "score_reading",
    "score_writing",
    "shapiro_wilk",
    "summarize_study",
    "wilcoxon_signed_rank",
]
