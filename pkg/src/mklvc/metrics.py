"""Objective-evaluation arithmetic: WER/CER over normalized text, speaker
cosine similarity, and the total score = distance to the ideal point
(WER=0, CER=0, SIM=1):

    total = sqrt(WER^2 + CER^2 + (1 - SIM)^2)

with all three components in [0, 1]. Raw WER/CER can exceed 1 (hypothesis
much longer than reference) and raw SIM can be negative; both are clamped
into range for the total while the raw values are kept.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


@dataclass(frozen=True)
class ScoreTriple:
    """Clamped WER/CER/SIM plus the total score computed from them."""

    wer: float
    cer: float
    sim: float
    total: float


@dataclass(frozen=True)
class PairScore:
    """One scored conversion: clamped triple plus the raw, unclamped values."""

    method: str
    pair_id: str
    triple: ScoreTriple
    raw_wer: float
    raw_cer: float
    raw_sim: float


@dataclass(frozen=True)
class MethodSummary:
    method: str
    n_pairs: int
    wer: float
    cer: float
    sim: float
    total: float


def normalize_text(text: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace."""
    text = text.lower().translate(_PUNCT_TABLE)
    return re.sub(r"\s+", " ", text).strip()


def edit_distance(a, b) -> int:
    """Levenshtein distance with unit insert/delete/substitute costs."""
    a = list(a)
    b = list(b)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, tok_a in enumerate(a, start=1):
        cur = [i]
        for j, tok_b in enumerate(b, start=1):
            cur.append(min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (tok_a != tok_b),
            ))
        prev = cur
    return prev[-1]


def wer(reference: str, hypothesis: str) -> float:
    """Word error rate over normalized text. May exceed 1."""
    ref = normalize_text(reference).split()
    hyp = normalize_text(hypothesis).split()
    if not ref:
        raise ValidationError("reference text is empty after normalization; WER undefined")
    return edit_distance(ref, hyp) / len(ref)


def cer(reference: str, hypothesis: str) -> float:
    """Character error rate over normalized text (spaces included). May exceed 1."""
    ref = normalize_text(reference)
    hyp = normalize_text(hypothesis)
    if not ref:
        raise ValidationError("reference text is empty after normalization; CER undefined")
    return edit_distance(ref, hyp) / len(ref)


def cosine_sim(u, v) -> float:
    """Cosine similarity in [-1, 1]; raises on zero vectors."""
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if u.size != v.size:
        raise ValidationError(f"vector length mismatch: {u.size} vs {v.size}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValidationError("cosine similarity undefined for zero vectors")
    return float(np.dot(u, v) / (nu * nv))


def clamp_components(raw_wer: float, raw_cer: float, raw_sim: float):
    """Map raw metric values into the [0, 1] ranges the total score expects."""
    return min(raw_wer, 1.0), min(raw_cer, 1.0), min(max(raw_sim, 0.0), 1.0)


def total_score(wer_value: float, cer_value: float, sim_value: float) -> ScoreTriple:
    """Distance to the ideal point; inputs must already lie in [0, 1]."""
    for name, v in (("wer", wer_value), ("cer", cer_value), ("sim", sim_value)):
        if not 0.0 <= v <= 1.0:
            raise ValidationError(f"{name}={v} outside [0, 1]; clamp raw values first")
    total = float(np.sqrt(wer_value**2 + cer_value**2 + (1.0 - sim_value) ** 2))
    return ScoreTriple(wer=wer_value, cer=cer_value, sim=sim_value, total=total)


def score_pair(method: str, pair_id: str, raw_wer: float, raw_cer: float, raw_sim: float) -> PairScore:
    """Clamp raw values and attach the total score."""
    w, c, s = clamp_components(raw_wer, raw_cer, raw_sim)
    return PairScore(
        method=method, pair_id=pair_id, triple=total_score(w, c, s),
        raw_wer=raw_wer, raw_cer=raw_cer, raw_sim=raw_sim,
    )


def aggregate(rows) -> list[MethodSummary]:
    """Leaderboard: per-method means of the clamped components, with the total
    score recomputed from those means; sorted ascending by total."""
    rows = list(rows)
    if not rows:
        raise ValidationError("no rows to aggregate")
    by_method: dict[str, list[PairScore]] = {}
    for row in rows:
        by_method.setdefault(row.method, []).append(row)
    out = []
    for method, group in by_method.items():
        mean_wer = float(np.mean([r.triple.wer for r in group]))
        mean_cer = float(np.mean([r.triple.cer for r in group]))
        mean_sim = float(np.mean([r.triple.sim for r in group]))
        triple = total_score(mean_wer, mean_cer, mean_sim)
        out.append(MethodSummary(
            method=method, n_pairs=len(group),
            wer=mean_wer, cer=mean_cer, sim=mean_sim, total=triple.total,
        ))
    out.sort(key=lambda m: (m.total, m.method))
    return out
