"""Region-record corpus I/O: line-delimited JSON ingestion, the
ungrounded-tuple filter, dataset statistics, and a Visual Genome
region-graph converter.

Corpus line format::

    {"image_id": "1", "region_id": "1_0", "description": "...",
     "scene_graph": {"objects": [...], "attributes": [...], "relations": [...]},
     "amr": "(z0 / ...)"}        # amr optional
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .scenegraph import (
    EmptyAfterNormalization,
    SceneGraph,
    SgError,
    normalize,
    sg_from_json,
    sg_to_json,
)

_WORD_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class RegionRecord:
    image_id: str
    region_id: str
    description: str
    scene_graph: SceneGraph
    amr: str | None = None


@dataclass
class LoadResult:
    records: list[RegionRecord]
    skipped: int
    errors: list[tuple[int, str]]  # (line number, message)


def record_to_json(record: RegionRecord) -> dict:
    data = {
        "image_id": record.image_id,
        "region_id": record.region_id,
        "description": record.description,
        "scene_graph": sg_to_json(record.scene_graph),
    }
    if record.amr is not None:
        data["amr"] = record.amr
    return data


def record_from_json(data: dict) -> RegionRecord:
    for key in ("image_id", "region_id", "description", "scene_graph"):
        if key not in data:
            raise KeyError(f"missing key {key!r}")
    image_id = str(data["image_id"])
    region_id = str(data["region_id"])
    description = data["description"]
    if not image_id or not region_id:
        raise ValueError("empty id")
    if not isinstance(description, str) or not description.strip():
        raise ValueError("empty description")
    return RegionRecord(
        image_id=image_id,
        region_id=region_id,
        description=description,
        scene_graph=sg_from_json(data["scene_graph"]),
        amr=data.get("amr"),
    )


def load_records(path: str | Path) -> LoadResult:
    """Load a JSONL corpus; malformed lines are counted and skipped."""
    records: list[RegionRecord] = []
    errors: list[tuple[int, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(record_from_json(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError, TypeError, SgError) as err:
                errors.append((lineno, f"line {lineno}: {err}"))
    return LoadResult(records, len(errors), errors)


def save_records(records: Iterable[RegionRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_json(record)) + "\n")


# --- ungrounded-tuple filter -----------------------------------------------


def _variants(token: str) -> set[str]:
    # naive suffix stemming: dogs -> dog, boxes -> box, running -> runn
    out = {token}
    if token.endswith("ing") and len(token) > 4:
        out.add(token[:-3])
    if token.endswith("es") and len(token) > 3:
        out.add(token[:-2])
    if token.endswith("s") and len(token) > 2:
        out.add(token[:-1])
    return out


def _grounded(name: str, description_variants: set[str]) -> bool:
    for word in _WORD_RE.findall(name.lower()):
        if _variants(word) & description_variants:
            return True
    return False


def filter_ungrounded(record: RegionRecord) -> RegionRecord:
    """Drop tuples whose head object shares no token with the description.

    Grounding is lexical overlap after lowercasing plus naive suffix
    stemming. Attributes and relations referencing a dropped object are
    dropped with it. Idempotent.
    """
    desc_variants: set[str] = set()
    for tok in _WORD_RE.findall(record.description.lower()):
        desc_variants |= _variants(tok)
    kept_names = {o.name for o in record.scene_graph.objects if _grounded(o.name, desc_variants)}
    sg = SceneGraph(
        [o for o in record.scene_graph.objects if o.name in kept_names],
        [a for a in record.scene_graph.attributes if a.object in kept_names],
        [
            r
            for r in record.scene_graph.relations
            if r.subject in kept_names and r.object in kept_names
        ],
    )
    return replace(record, scene_graph=sg)


# --- statistics ------------------------------------------------------------


@dataclass(frozen=True)
class CorpusStats:
    image_count: int
    region_count: int
    mean_regions_per_image: float
    object_tuples: int
    attribute_tuples: int
    relation_tuples: int

    def to_json(self) -> dict:
        return {
            "image_count": self.image_count,
            "region_count": self.region_count,
            "mean_regions_per_image": self.mean_regions_per_image,
            "object_tuples": self.object_tuples,
            "attribute_tuples": self.attribute_tuples,
            "relation_tuples": self.relation_tuples,
        }


def corpus_stats(records: Sequence[RegionRecord]) -> CorpusStats:
    image_ids = {r.image_id for r in records}
    return CorpusStats(
        image_count=len(image_ids),
        region_count=len(records),
        mean_regions_per_image=len(records) / len(image_ids) if image_ids else 0.0,
        object_tuples=sum(len(r.scene_graph.objects) for r in records),
        attribute_tuples=sum(len(r.scene_graph.attributes) for r in records),
        relation_tuples=sum(len(r.scene_graph.relations) for r in records),
    )


# --- Visual Genome region graphs ------------------------------------------


def _vg_object_name(obj: dict) -> str | None:
    name = obj.get("name") or (obj.get("names") or [None])[0]
    if not name:
        return None
    try:
        return normalize(str(name))
    except EmptyAfterNormalization:
        return None


def convert_vg_regions(vg_images: Iterable[dict]) -> list[RegionRecord]:
    """Map the Visual Genome region-graph JSON layout into region records.

    Expected per-image shape: {"image_id", "regions": [{"region_id",
    "phrase", "objects": [{"object_id", "name"/"names", "attributes"?}],
    "relationships": [{"subject_id", "object_id", "predicate"}]}]}.
    Objects without a usable name and relationships with unresolvable
    endpoints are skipped. All terms are normalized.
    """
    records: list[RegionRecord] = []
    for image in vg_images:
        image_id = str(image.get("image_id", ""))
        for region in image.get("regions", []):
            phrase = (region.get("phrase") or "").strip()
            if not phrase or not image_id:
                continue
            by_id: dict = {}
            objects: list[str] = []
            attributes: list[tuple[str, str]] = []
            for obj in region.get("objects", []):
                name = _vg_object_name(obj)
                if name is None:
                    continue
                if "object_id" in obj:
                    by_id[obj["object_id"]] = name
                objects.append(name)
                for attr in obj.get("attributes", []):
                    try:
                        attributes.append((name, normalize(str(attr))))
                    except EmptyAfterNormalization:
                        continue
            relations: list[tuple[str, str, str]] = []
            for rel in region.get("relationships", []):
                subj = by_id.get(rel.get("subject_id"))
                obj = by_id.get(rel.get("object_id"))
                pred = rel.get("predicate")
                if subj is None or obj is None or not pred:
                    continue
                try:
                    relations.append((subj, normalize(str(pred)), obj))
                except EmptyAfterNormalization:
                    continue
            records.append(
                RegionRecord(
                    image_id=image_id,
                    region_id=str(region.get("region_id", f"{image_id}_{len(records)}")),
                    description=phrase,
                    scene_graph=SceneGraph(objects, attributes, relations),
                )
            )
    return records
