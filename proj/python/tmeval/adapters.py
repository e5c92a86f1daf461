"""Exporters from fitted topic models into the interchange bundle format.

The exporters are duck-typed so this module needs no modeling library:

* a topic model provides ``get_topics()`` returning ``{topic_id: [(word, weight), ...]}``
  (negative ids, such as an outlier topic, are skipped) and
  ``approximate_distribution(documents)`` returning a documents x topics array,
  or a tuple whose first item is that array;
* an encoder provides ``encode(list_of_str, batch_size=...)`` returning one
  vector per string.
"""

from __future__ import annotations

import argparse
import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

ROW_SUM_TOLERANCE = 1e-6


@dataclass
class ExportConfig:
    output_dir: Path
    top_k_keywords: int = 30
    embedding_model_name: str = ""
    batch_size: int = 64

    def __post_init__(self) -> None:
        self.output_dir = Path(self.output_dir)
        if self.top_k_keywords < 1:
            raise ValueError("top_k_keywords must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def export_topic_model(
    model: Any,
    documents: Sequence[str],
    config: ExportConfig,
    *,
    model_id: str,
    doc_ids: Sequence[str] | None = None,
    covariates: Mapping[str, Sequence[str]] | None = None,
) -> Path:
    """Writes topics.csv, theta.csv, covariates.csv and manifest.json; returns the manifest path."""
    if not hasattr(model, "approximate_distribution"):
        raise TypeError(f"{type(model).__name__} has no approximate_distribution(); cannot export theta")
    topics = {int(k): v for k, v in model.get_topics().items() if int(k) >= 0}
    if not topics:
        raise ValueError("model reports no topics")
    ids = list(doc_ids) if doc_ids is not None else [f"doc{i}" for i in range(len(documents))]
    if len(ids) != len(documents):
        raise ValueError("doc_ids and documents differ in length")

    dist = model.approximate_distribution(list(documents))
    theta = np.asarray(dist[0] if isinstance(dist, tuple) else dist, dtype=float)
    if theta.shape != (len(documents), len(topics)):
        raise ValueError(f"distribution shape {theta.shape} does not match "
                         f"{len(documents)} documents x {len(topics)} topics")

    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)
    order = sorted(topics)
    _write_csv(
        out / "topics.csv",
        ["model_id", "topic_index", "rank", "token", "weight"],
        (
            [model_id, k, rank, word, repr(float(weight))]
            for k in order
            for rank, (word, weight) in enumerate(topics[k][: config.top_k_keywords], start=1)
        ),
    )
    _write_csv(
        out / "theta.csv",
        ["doc_id"] + [f"t{k}" for k in order],
        ([doc] + [repr(float(v)) for v in row] for doc, row in zip(ids, theta)),
    )
    columns = dict(covariates or {})
    for name, values in columns.items():
        if len(values) != len(ids):
            raise ValueError(f"covariate '{name}' has {len(values)} values for {len(ids)} documents")
    _write_csv(
        out / "covariates.csv",
        ["doc_id"] + list(columns),
        ([doc] + [columns[c][i] for c in columns] for i, doc in enumerate(ids)),
    )
    normalized = bool(np.all(np.abs(theta.sum(axis=1) - 1.0) <= ROW_SUM_TOLERANCE))
    manifest = {
        "model_id": model_id,
        "files": {"topics": "topics.csv", "theta": "theta.csv", "covariates": "covariates.csv"},
        "normalized": normalized,
        "provenance": f"exported from {type(model).__name__}",
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return out / "manifest.json"


def _distinct_keywords(topic_files: Sequence[Path], top_k: int) -> list[str]:
    seen: dict[str, None] = {}
    for path in topic_files:
        with Path(path).open(newline="", encoding="utf-8") as f:
            for row in csv.DictReader(f):
                if int(row["rank"]) <= top_k:
                    seen.setdefault(row["token"], None)
    return list(seen)


def export_keyword_embeddings(
    topic_files: Sequence[Path], encoder: Any, config: ExportConfig
) -> Path:
    """Encodes every distinct keyword once and writes embeddings.csv."""
    words = _distinct_keywords(topic_files, config.top_k_keywords)
    if not words:
        raise ValueError("no keywords to embed")
    vectors = np.asarray(encoder.encode(words, batch_size=config.batch_size), dtype=float)
    if vectors.ndim != 2 or vectors.shape[0] != len(words):
        raise ValueError(f"encoder returned shape {vectors.shape} for {len(words)} keywords")
    config.output_dir.mkdir(parents=True, exist_ok=True)
    path = config.output_dir / "embeddings.csv"
    _write_csv(
        path,
        ["token"] + [f"e{d}" for d in range(vectors.shape[1])],
        ([w] + [repr(float(x)) for x in v] for w, v in zip(words, vectors)),
    )
    manifest = config.output_dir / "manifest.json"
    if manifest.exists():
        data = json.loads(manifest.read_text(encoding="utf-8"))
        data["files"]["embeddings"] = "embeddings.csv"
        data["dim"] = int(vectors.shape[1])
        manifest.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return path


def export_embeddings_main(argv: Sequence[str] | None = None) -> int:
    """``export-embeddings``: encode keywords with a sentence-transformers model."""
    p = argparse.ArgumentParser(prog="export-embeddings")
    p.add_argument("--topics", action="append", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--model", required=True, help="sentence-transformers model name or path")
    p.add_argument("--top-k", type=int, default=30)
    p.add_argument("--batch-size", type=int, default=64)
    args = p.parse_args(argv)
    from sentence_transformers import SentenceTransformer

    config = ExportConfig(args.out, args.top_k, args.model, args.batch_size)
    path = export_keyword_embeddings(args.topics, SentenceTransformer(args.model), config)
    print(path)
    return 0


def export_model_main(argv: Sequence[str] | None = None) -> int:
    """``export-model``: export a saved BERTopic model over a doc_id,text CSV."""
    p = argparse.ArgumentParser(prog="export-model")
    p.add_argument("--model", required=True, type=Path, help="saved BERTopic model")
    p.add_argument("--documents", required=True, type=Path, help="CSV with doc_id,text[,covariates...]")
    p.add_argument("--model-id", required=True)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--top-k", type=int, default=30)
    args = p.parse_args(argv)
    from bertopic import BERTopic

    with args.documents.open(newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    extra = [c for c in rows[0] if c not in ("doc_id", "text")] if rows else []
    path = export_topic_model(
        BERTopic.load(str(args.model)),
        [r["text"] for r in rows],
        ExportConfig(args.out, args.top_k),
        model_id=args.model_id,
        doc_ids=[r["doc_id"] for r in rows],
        covariates={c: [r[c] for r in rows] for c in extra},
    )
    print(path)
    return 0
