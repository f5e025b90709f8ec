"""Versioned, checksummed model files.

Each file holds two lines: a JSON header with the format name, version,
model kind and the SHA-256 of the payload line, then the payload itself as
canonical JSON.  Floats are written with ``repr`` precision, so a loaded
model scores bit-identically to the one that was saved.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Mapping, Optional
from urllib.parse import quote

import numpy as np

from .core import Source
from .errors import ModelIntegrityError, ModelVersionError
from .ltr.lambdamart import LambdaMartModel
from .ltr.tree import RegressionTree
from .reviews import ReviewModel
from .svm import SvmModel
from .text import Vocabulary

FORMAT_NAME = "venuerank-model"
FORMAT_VERSION = 1
RANKER_FILE = "ranker.json"
SVM_DIR = "svm"


def _canonical(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False,
                      allow_nan=False).encode("utf-8")


def write_model_file(path: os.PathLike | str, kind: str, payload: dict) -> None:
    body = _canonical(payload)
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": kind,
        "sha256": hashlib.sha256(body).hexdigest(),
    }
    with open(path, "wb") as fh:
        fh.write(_canonical(header) + b"\n" + body + b"\n")


def read_model_file(path: os.PathLike | str, kind: str) -> dict:
    """Read and verify one model file.

    Raises:
        ModelIntegrityError: unreadable header, checksum mismatch or wrong kind.
        ModelVersionError: written by another format version.
    """
    raw = Path(path).read_bytes()
    head, sep, rest = raw.partition(b"\n")
    try:
        header = json.loads(head)
    except ValueError as exc:
        raise ModelIntegrityError(f"{path}: unreadable header") from exc
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise ModelIntegrityError(f"{path}: not a {FORMAT_NAME} file")
    if header.get("version") != FORMAT_VERSION:
        raise ModelVersionError(
            f"{path}: format version {header.get('version')}, expected {FORMAT_VERSION}"
        )
    body = rest[:-1] if rest.endswith(b"\n") else rest
    if not sep or hashlib.sha256(body).hexdigest() != header.get("sha256"):
        raise ModelIntegrityError(f"{path}: checksum mismatch")
    if header.get("kind") != kind:
        raise ModelIntegrityError(f"{path}: holds a {header.get('kind')!r} model, not {kind!r}")
    return json.loads(body)


def review_model_payload(model: ReviewModel) -> dict:
    return {
        "user_id": model.user_id,
        "source": model.source.value,
        "vocabulary": {
            "document_frequency": dict(model.vocabulary.document_frequency),
            "document_count": model.vocabulary.document_count,
        },
        "weights": model.svm.weights.tolist(),
        "bias": model.svm.bias,
        "training_meta": model.svm.training_meta,
    }


def review_model_from_payload(payload: Mapping) -> ReviewModel:
    vocab = payload["vocabulary"]
    svm = SvmModel(
        np.asarray(payload["weights"], dtype=np.float64),
        float(payload["bias"]),
        dict(payload["training_meta"]),
    )
    return ReviewModel(
        payload["user_id"],
        Source(payload["source"]),
        Vocabulary(vocab["document_frequency"], vocab["document_count"]),
        svm,
    )


def ranker_payload(model: LambdaMartModel) -> dict:
    return {
        "learning_rate": model.learning_rate,
        "config": model.config,
        "seed": model.seed,
        "training_ndcg": list(model.training_ndcg),
        "trees": [t.to_dict() for t in model.trees],
    }


def ranker_from_payload(payload: Mapping) -> LambdaMartModel:
    return LambdaMartModel(
        tuple(RegressionTree.from_dict(t) for t in payload["trees"]),
        float(payload["learning_rate"]),
        dict(payload["config"]),
        int(payload["seed"]),
        tuple(payload["training_ndcg"]),
    )


def save_review_model(path: os.PathLike | str, model: ReviewModel) -> None:
    write_model_file(path, "svm", review_model_payload(model))


def load_review_model(path: os.PathLike | str) -> ReviewModel:
    return review_model_from_payload(read_model_file(path, "svm"))


def save_ranker(path: os.PathLike | str, model: LambdaMartModel) -> None:
    write_model_file(path, "lambdamart", ranker_payload(model))


def load_ranker(path: os.PathLike | str) -> LambdaMartModel:
    return ranker_from_payload(read_model_file(path, "lambdamart"))


def review_model_filename(user_id: str, source: Source) -> str:
    return f"{quote(user_id, safe='')}__{source.value}.json"


def save_models(
    directory: os.PathLike | str,
    review_models: Mapping[str, Mapping[Source, Optional[ReviewModel]]],
    ranker: LambdaMartModel,
) -> None:
    """Write the ranker and one file per trained (user, source) classifier."""
    directory = Path(directory)
    svm_dir = directory / SVM_DIR
    svm_dir.mkdir(parents=True, exist_ok=True)
    for user_id in sorted(review_models):
        for source, model in sorted(review_models[user_id].items(), key=lambda kv: kv[0].value):
            if model is not None:
                save_review_model(svm_dir / review_model_filename(user_id, source), model)
    save_ranker(directory / RANKER_FILE, ranker)


def load_models(
    directory: os.PathLike | str,
) -> tuple[dict[str, dict[Source, ReviewModel]], LambdaMartModel]:
    directory = Path(directory)
    review_models: dict[str, dict[Source, ReviewModel]] = {}
    svm_dir = directory / SVM_DIR
    if svm_dir.is_dir():
        for path in sorted(svm_dir.glob("*.json")):
            model = load_review_model(path)
            review_models.setdefault(model.user_id, {})[model.source] = model
    return review_models, load_ranker(directory / RANKER_FILE)
