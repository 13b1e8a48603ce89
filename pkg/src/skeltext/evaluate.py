"""Detection scoring against ground-truth rectangles, plus file formats.

Default matching is the soft harmonic-area rule 2*|a n b| / (|a| + |b|)
accumulated over best matches; a strict IoU >= 0.5 counting mode is
available for modern comparability. Corpus figures are box-count-weighted
means over images unless per-image averaging is requested.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

Rect = tuple[float, float, float, float]


@dataclass
class GroundTruth:
    image_id: str
    boxes: list[tuple] = field(default_factory=list)  # (x, y, w, h[, transcription])


@dataclass
class ImageEval:
    image_id: str
    matches: list[tuple[int, int | None, float]]  # det index, best truth index, score
    precision: float
    recall: float


@dataclass
class EvalReport:
    precision: float
    recall: float
    f_measure: float
    per_image: list[ImageEval] = field(default_factory=list)

    def to_text(self) -> str:
        return (
            f"precision: {self.precision:.6f}\n"
            f"recall: {self.recall:.6f}\n"
            f"f_measure: {self.f_measure:.6f}\n"
        )

    def summary_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
        }

    def write_summary(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.summary_dict(), indent=2) + "\n")


def _rect(box) -> Rect:
    if hasattr(box, "width") and hasattr(box, "x"):
        return float(box.x), float(box.y), float(box.width), float(box.height)
    return float(box[0]), float(box[1]), float(box[2]), float(box[3])


def _intersection(a: Rect, b: Rect) -> float:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    iw = min(ax + aw, bx + bw) - max(ax, bx)
    ih = min(ay + ah, by + bh) - max(ay, by)
    if iw <= 0 or ih <= 0:
        return 0.0
    return iw * ih


def match_score(a, b) -> float:
    """Harmonic area match: 2*|a n b| / (|a| + |b|); 0 for degenerate boxes."""
    ra, rb = _rect(a), _rect(b)
    area_a = ra[2] * ra[3]
    area_b = rb[2] * rb[3]
    if area_a <= 0 or area_b <= 0:
        return 0.0
    inter = _intersection(ra, rb)
    if inter == 0.0:
        return 0.0
    return 2.0 * inter / (area_a + area_b)


def iou(a, b) -> float:
    ra, rb = _rect(a), _rect(b)
    area_a = ra[2] * ra[3]
    area_b = rb[2] * rb[3]
    if area_a <= 0 or area_b <= 0:
        return 0.0
    inter = _intersection(ra, rb)
    union = area_a + area_b - inter
    return inter / union if union > 0 else 0.0


def _f_measure(p: float, r: float) -> float:
    return 2.0 * p * r / (p + r) if p + r > 0 else 0.0


def _soft_sums(dets: Sequence, truths: Sequence):
    matches: list[tuple[int, int | None, float]] = []
    p_sum = 0.0
    for i, d in enumerate(dets):
        scores = [match_score(d, t) for t in truths]
        if scores:
            j = int(max(range(len(scores)), key=lambda k: scores[k]))
            best = scores[j]
            matches.append((i, j if best > 0 else None, best))
        else:
            best = 0.0
            matches.append((i, None, 0.0))
        p_sum += best
    r_sum = 0.0
    for t in truths:
        r_sum += max((match_score(t, d) for d in dets), default=0.0)
    return p_sum, r_sum, matches


def _iou_sums(dets: Sequence, truths: Sequence, cutoff: float = 0.5):
    pairs = sorted(
        ((iou(d, t), i, j) for i, d in enumerate(dets) for j, t in enumerate(truths)),
        key=lambda p: (-p[0], p[1], p[2]),
    )
    used_d: set[int] = set()
    used_t: set[int] = set()
    matches: list[tuple[int, int | None, float]] = []
    for score, i, j in pairs:
        if score < cutoff:
            break
        if i in used_d or j in used_t:
            continue
        used_d.add(i)
        used_t.add(j)
        matches.append((i, j, score))
    tp = float(len(matches))
    return tp, tp, matches


def evaluate(
    detections: Mapping[str, Sequence],
    truth: Sequence[GroundTruth],
    mode: str = "harmonic",
    per_image_mean: bool = False,
) -> EvalReport:
    """Score detections against truth; see module docstring for conventions.

    Empty detections on an image with truth contribute zero precision weight
    and zero recall; an image with no truth boxes scores recall 1.
    """
    if mode not in ("harmonic", "iou"):
        raise ValueError(f"unknown evaluation mode {mode!r}")
    truth_ids = {g.image_id for g in truth}
    unknown = set(detections) - truth_ids
    if unknown:
        raise ValueError(f"detections reference unknown image ids: {sorted(unknown)}")

    per_image: list[ImageEval] = []
    total_p = total_r = 0.0
    total_d = total_t = 0
    for gt in sorted(truth, key=lambda g: g.image_id):
        dets = list(detections.get(gt.image_id, []))
        truths = list(gt.boxes)
        if mode == "harmonic":
            p_sum, r_sum, matches = _soft_sums(dets, truths)
        else:
            p_sum, r_sum, matches = _iou_sums(dets, truths)
        if dets:
            p_img = p_sum / len(dets)
        else:
            p_img = 1.0 if not truths else 0.0
        r_img = r_sum / len(truths) if truths else 1.0
        per_image.append(ImageEval(gt.image_id, matches, p_img, r_img))
        total_p += p_sum
        total_r += r_sum
        total_d += len(dets)
        total_t += len(truths)

    if per_image_mean:
        n = len(per_image)
        p = sum(e.precision for e in per_image) / n if n else 1.0
        r = sum(e.recall for e in per_image) / n if n else 1.0
    else:
        if total_d > 0:
            p = total_p / total_d
        else:
            p = 1.0 if total_t == 0 else 0.0
        r = total_r / total_t if total_t > 0 else 1.0
    return EvalReport(precision=p, recall=r, f_measure=_f_measure(p, r), per_image=per_image)


# --- file formats -----------------------------------------------------------

def parse_truth_text(text: str) -> list[GroundTruth]:
    """Lines of `image_id x y w h [transcription]`."""
    by_id: dict[str, GroundTruth] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 5:
            raise ValueError(f"line {lineno}: expected 'image_id x y w h [transcription]'")
        image_id = parts[0]
        try:
            x, y, w, h = (float(v) for v in parts[1:5])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad coordinate: {exc}") from exc
        if w < 0 or h < 0:
            raise ValueError(f"line {lineno}: negative box dimensions")
        transcription = " ".join(parts[5:]) if len(parts) > 5 else None
        box = (x, y, w, h) if transcription is None else (x, y, w, h, transcription)
        by_id.setdefault(image_id, GroundTruth(image_id)).boxes.append(box)
    return list(by_id.values())


def load_truth_file(path: str | Path) -> list[GroundTruth]:
    return parse_truth_text(Path(path).read_text())


def write_truth_file(path: str | Path, truths: Sequence[GroundTruth]) -> None:
    lines = []
    for gt in truths:
        for box in gt.boxes:
            x, y, w, h = (int(round(v)) for v in box[:4])
            suffix = f" {box[4]}" if len(box) > 4 and box[4] else ""
            lines.append(f"{gt.image_id} {x} {y} {w} {h}{suffix}")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def parse_detections_text(text: str) -> dict[str, list[tuple]]:
    """Lines of `image_id x y w h score`, grouped per image in file order."""
    out: dict[str, list[tuple]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 6:
            raise ValueError(f"line {lineno}: expected 'image_id x y w h score'")
        try:
            x, y, w, h, score = (float(v) for v in parts[1:])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad number: {exc}") from exc
        out.setdefault(parts[0], []).append((x, y, w, h, score))
    return out


def load_detections_file(path: str | Path) -> dict[str, list[tuple]]:
    return parse_detections_text(Path(path).read_text())


def format_detections(per_image: Mapping[str, Sequence]) -> str:
    lines = []
    for image_id, boxes in per_image.items():
        for b in boxes:
            x, y, w, h = (int(round(v)) for v in _rect(b))
            if hasattr(b, "score"):
                score = float(b.score)
            else:
                score = float(b[4]) if len(b) > 4 else 0.0
            lines.append(f"{image_id} {x} {y} {w} {h} {score:.6f}")
    return "\n".join(lines) + ("\n" if lines else "")


def write_detections_file(path: str | Path, per_image: Mapping[str, Sequence]) -> None:
    Path(path).write_text(format_detections(per_image))


def load_icdar2003_xml(path: str | Path) -> list[GroundTruth]:
    """Ingest the ICDAR 2003 tagged-rectangles ground-truth XML."""
    root = ET.parse(str(path)).getroot()
    truths: list[GroundTruth] = []
    for image in root.iter("image"):
        name = image.findtext("imageName", default="").strip()
        gt = GroundTruth(image_id=name)
        for rect in image.iter("taggedRectangle"):
            x = float(rect.get("x", 0))
            y = float(rect.get("y", 0))
            w = float(rect.get("width", 0))
            h = float(rect.get("height", 0))
            tag = rect.findtext("tag")
            box = (x, y, w, h) if tag is None else (x, y, w, h, tag.strip())
            gt.boxes.append(box)
        truths.append(gt)
    return truths
