"""CSV/JSON writers for counts, decoded counts, embeddings and Gram matrices."""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .embedding import Embedding, FeatureKey, GramMatrix, to_matrix


def serialize_class(c) -> str:
    if c is None:
        return ""
    if isinstance(c, tuple):
        return "-".join(map(str, c))
    return str(c)


def write_decoded_csv(path: Path, rows: Iterable[tuple]) -> None:
    """Rows are ``(graph_id, u, v, length, kind, class_or_labelling, count)``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["graph_id", "u", "v", "length", "kind", "class_or_labelling", "count"])
        for gid, u, v, l, kind, c, m in rows:
            w.writerow([gid, u, v, l, kind, serialize_class(c), m])


def write_embedding_sparse(path: Path, embeddings: Sequence[Embedding]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["graph_id", "kind", "length", "start_label", "class_or_labelling", "end_label", "count"])
        for e in embeddings:
            for key in sorted(e.counts, key=FeatureKey.sort_key):
                if not e.counts[key]:
                    continue
                end = "" if key.end_label is None else key.end_label
                w.writerow([e.graph_id, key.kind, key.length, key.start_label, serialize_class(key.cls), end, e.counts[key]])


def read_embedding_sparse(path: Path) -> list[Embedding]:
    out: dict = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            c = row["class_or_labelling"]
            cls = None if c == "" else (tuple(int(x) for x in c.split("-")) if "-" in c else int(c))
            end = int(row["end_label"]) if row["end_label"] else None
            key = FeatureKey(row["kind"], int(row["length"]), int(row["start_label"]), cls, end)
            gid = int(row["graph_id"])
            out.setdefault(gid, {})[key] = int(row["count"])
    return [Embedding(counts, gid) for gid, counts in sorted(out.items())]


def write_embedding_dense(path: Path, embeddings: Sequence[Embedding], index: Sequence[FeatureKey]) -> None:
    x = to_matrix(embeddings, index)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["graph_id"] + [k.serialize() for k in index])
        for e, row in zip(embeddings, x):
            w.writerow([e.graph_id] + [int(v) for v in row])


def write_gram(path: Path, g: GramMatrix) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["graph_id"] + list(g.graph_ids))
        for gid, row in zip(g.graph_ids, g.values):
            w.writerow([gid] + [repr(float(v)) for v in row])


def read_gram(path: Path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    return np.array([[float(v) for v in r[1:]] for r in rows])


def write_json(path: Path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n")


def config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True, default=str).encode()).hexdigest()[:16]


def write_manifest(out: Path, config: dict, files: Sequence[str]) -> None:
    write_json(out / "manifest.json", {"config": config, "config_hash": config_hash(config), "files": sorted(files)})
