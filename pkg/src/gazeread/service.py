"""Session pipeline: gaze ingestion, scoring, simplification, per-user training."""

from __future__ import annotations

import csv
import json
import threading
import uuid
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import features as feats
from . import linguistics as ling
from . import model as mdl
from .gaze import GazeSample, IvtParams, detect_fixations, GAZE_LOG_HEADER
from .layout import (DEFAULT_SNAP_RADIUS, LayoutDocument, layout_from_dict,
                     layout_to_dict, resolve_fixations)
from .simplify import (CompletionClient, MockClient, build_prompt,
                       replace_sentence, simplify)


class SessionState(str, Enum):
    READING = "reading"
    SCORED = "scored"
    SIMPLIFIED = "simplified"


class NotFoundError(KeyError):
    pass


class StateError(RuntimeError):
    pass


@dataclass
class Session:
    session_id: str
    user_id: str
    layout: LayoutDocument
    state: SessionState = SessionState.READING
    gaze_buffer: list = field(default_factory=list)
    last_timestamp: float = float("-inf")
    scores: Optional[list] = None
    flagged: Optional[list] = None
    marks: Optional[list] = None
    sentences: list = field(default_factory=list)  # current slot contents
    change_records: list = field(default_factory=list)


@dataclass
class ServiceConfig:
    ivt: IvtParams = field(default_factory=IvtParams)
    snap_radius: float = DEFAULT_SNAP_RADIUS
    n_trees: int = mdl.DEFAULT_N_TREES
    learning_rate: float = mdl.DEFAULT_LEARNING_RATE
    folds: int = mdl.DEFAULT_FOLDS
    seed: int = 0
    client: dict = field(default_factory=lambda: {"kind": "mock"})

    @classmethod
    def from_file(cls, path) -> "ServiceConfig":
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
        ivt = IvtParams(**raw["ivt"]) if "ivt" in raw else IvtParams()
        return cls(
            ivt=ivt,
            snap_radius=raw.get("snap_radius", DEFAULT_SNAP_RADIUS),
            n_trees=raw.get("n_trees", mdl.DEFAULT_N_TREES),
            learning_rate=raw.get("learning_rate", mdl.DEFAULT_LEARNING_RATE),
            folds=raw.get("folds", mdl.DEFAULT_FOLDS),
            seed=raw.get("seed", 0),
            client=raw.get("client", {"kind": "mock"}),
        )

    def make_client(self) -> CompletionClient:
        kind = self.client.get("kind", "mock")
        if kind == "mock":
            return MockClient.with_bundled_pairs()
        if kind == "http":
            from .simplify import HttpChatClient
            return HttpChatClient(
                endpoint=self.client["endpoint"],
                model=self.client["model"],
                api_key=self.client.get("api_key", ""),
                timeout=self.client.get("timeout", 30.0),
            )
        raise ValueError(f"unknown client kind: {kind}")


CORPUS_HEADER = ["session_id", "sentence_index"] + feats.CSV_FEATURE_COLUMNS + ["label"]


class ReadingService:
    """Desk-scale service: sessions in memory, per-user state on disk."""

    def __init__(self, store_dir, aoa: ling.Lexicon, zipf: ling.Lexicon,
                 config: Optional[ServiceConfig] = None):
        self.store = Path(store_dir)
        self.store.mkdir(parents=True, exist_ok=True)
        self.aoa = aoa
        self.zipf = zipf
        self.config = config or ServiceConfig()
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    # --- paths ---------------------------------------------------------------

    def _user_dir(self, user_id: str) -> Path:
        d = self.store / "users" / user_id
        d.mkdir(parents=True, exist_ok=True)
        return d

    def _session_dir(self, session_id: str) -> Path:
        d = self.store / "sessions" / session_id
        d.mkdir(parents=True, exist_ok=True)
        return d

    def _get(self, session_id: str) -> Session:
        try:
            return self.sessions[session_id]
        except KeyError:
            raise NotFoundError(f"unknown session: {session_id}") from None

    # --- session lifecycle -----------------------------------------------------

    def create_session(self, user_id: str, layout: LayoutDocument | dict) -> str:
        if isinstance(layout, dict):
            layout = layout_from_dict(layout)  # raises ValueError with location
        session_id = uuid.uuid4().hex
        session = Session(session_id=session_id, user_id=user_id, layout=layout,
                          sentences=layout.sentence_texts())
        with self._lock:
            self.sessions[session_id] = session
        sdir = self._session_dir(session_id)
        with open(sdir / "layout.json", "w", encoding="utf-8") as f:
            json.dump(layout_to_dict(layout), f)
        with open(sdir / "gaze.csv", "w", newline="", encoding="utf-8") as f:
            csv.writer(f).writerow(GAZE_LOG_HEADER)
        self._save_meta(session)
        return session_id

    def ingest_gaze(self, session_id: str, batch: Sequence[GazeSample]) -> int:
        session = self._get(session_id)
        if session.state is not SessionState.READING:
            raise StateError("gaze ingestion only allowed while reading")
        if not batch:
            return 0
        for i in range(1, len(batch)):
            if batch[i].timestamp < batch[i - 1].timestamp:
                raise ValueError("non-monotone")
        if batch[0].timestamp < session.last_timestamp:
            raise ValueError("non-monotone")
        # durable append before the in-memory commit
        with open(self._session_dir(session_id) / "gaze.csv", "a", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            for s in batch:
                w.writerow([repr(float(s.timestamp)), repr(float(s.x)), repr(float(s.y)), int(s.valid)])
        session.gaze_buffer.extend(batch)
        session.last_timestamp = batch[-1].timestamp
        return len(batch)

    def _feature_matrix(self, session: Session) -> np.ndarray:
        fixations = detect_fixations(session.gaze_buffer, self.config.ivt)
        resolved = resolve_fixations(fixations, session.layout, self.config.snap_radius)
        return feats.build_matrix(session.layout, resolved, self.aoa, self.zipf)

    def finalize_and_score(self, session_id: str):
        session = self._get(session_id)
        if session.state in (SessionState.SCORED, SessionState.SIMPLIFIED):
            return list(session.scores), list(session.flagged)
        model = self.load_model(session.user_id)
        if model is None:
            raise StateError(f"untrained user: {session.user_id}")
        X = self._feature_matrix(session)
        scores = mdl.predict_full(model, X)
        session.scores = [float(s) for s in scores]
        session.flagged = [i for i, s in enumerate(scores) if s < 0.5]
        session.state = SessionState.SCORED
        self._save_meta(session)
        return list(session.scores), list(session.flagged)

    def simplify_flagged(self, session_id: str, client: Optional[CompletionClient] = None):
        session = self._get(session_id)
        if session.state is not SessionState.SCORED:
            raise StateError("session must be scored before simplification")
        client = client or self.config.make_client()
        results, errors = [], []
        for idx in session.flagged or []:
            try:
                req = build_prompt(idx, session.sentences[idx])
                res = simplify(req, client)
                session.sentences, record = replace_sentence(session.sentences, idx, res.simplified)
                session.change_records.append(record)
                results.append(res)
            except Exception as e:  # per-sentence isolation
                errors.append({"sentence_index": idx, "error": str(e)})
        session.state = SessionState.SIMPLIFIED
        self._save_meta(session)
        return results, errors

    def submit_marks(self, session_id: str, marks: Sequence[bool]) -> int:
        session = self._get(session_id)
        n = len(session.layout.sentences)
        if len(marks) != n:
            raise ValueError(f"marks length {len(marks)} != sentence count {n}")
        session.marks = [bool(m) for m in marks]
        X = self._feature_matrix(session)
        labels = [not m for m in session.marks]  # understood = not marked
        self._upsert_corpus_rows(session.user_id, session.session_id, X, labels)
        self._save_meta(session)
        return n

    def get_document(self, session_id: str) -> dict:
        session = self._get(session_id)
        return {
            "session_id": session.session_id,
            "user_id": session.user_id,
            "state": session.state.value,
            "sentences": list(session.sentences),
            "scores": session.scores,
            "flagged": session.flagged,
            "changes": [
                {"sentence_index": c.sentence_index, "before": c.before, "after": c.after}
                for c in session.change_records
            ],
        }

    # --- per-user store ---------------------------------------------------------

    def _corpus_path(self, user_id: str) -> Path:
        return self._user_dir(user_id) / "corpus.csv"

    def _upsert_corpus_rows(self, user_id: str, session_id: str,
                            X: np.ndarray, labels: Sequence[bool]) -> None:
        path = self._corpus_path(user_id)
        rows = []
        if path.exists():
            with open(path, newline="", encoding="utf-8") as f:
                r = csv.reader(f)
                next(r)
                rows = [row for row in r if row and row[0] != session_id]
        for i, (vec, label) in enumerate(zip(X, labels)):
            rows.append([session_id, str(i)] + [repr(float(v)) for v in vec] + [str(int(label))])
        with open(path, "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(CORPUS_HEADER)
            w.writerows(rows)

    def load_corpus(self, user_id: str):
        path = self._corpus_path(user_id)
        if not path.exists():
            return np.empty((0, feats.N_FEATURES)), np.empty(0, dtype=bool)
        X, y = [], []
        with open(path, newline="", encoding="utf-8") as f:
            r = csv.reader(f)
            header = next(r)
            if header != CORPUS_HEADER:
                raise ValueError(f"bad corpus header in {path}")
            for row in r:
                if not row:
                    continue
                X.append([float(v) for v in row[2:18]])
                y.append(bool(int(row[18])))
        return np.array(X), np.array(y, dtype=bool)

    def append_corpus(self, user_id: str, X: np.ndarray, labels: Sequence[bool],
                      session_id: Optional[str] = None) -> None:
        """Bulk import of labeled rows (replay/synthetic paths)."""
        self._upsert_corpus_rows(user_id, session_id or uuid.uuid4().hex, X, labels)

    def train_user(self, user_id: str, seed: Optional[int] = None) -> mdl.EvalReport:
        X, y = self.load_corpus(user_id)
        if len(y) < 30:
            raise ValueError(f"insufficient corpus for {user_id}: {len(y)} rows")
        if y.all() or not y.any():
            raise ValueError("single-class corpus")
        seed = self.config.seed if seed is None else seed
        train_idx, test_idx = mdl.split_dataset(X, y, seed=seed)
        model, search = mdl.grid_search_train(
            X[train_idx], y[train_idx], k=self.config.folds, seed=seed,
            n_trees=self.config.n_trees, learning_rate=self.config.learning_rate)
        preds = mdl.classify_threshold(mdl.predict_full(model, X[test_idx]))
        report = mdl.weighted_metrics(y[test_idx], preds)
        report.selected_features = list(search.selected_features)
        mdl.save_model(self._user_dir(user_id) / "model.json", model)
        with open(self._user_dir(user_id) / "report.json", "w", encoding="utf-8") as f:
            json.dump(report.to_dict(), f, indent=1)
        return report

    def load_model(self, user_id: str) -> Optional[mdl.ComprehensionModel]:
        path = self._user_dir(user_id) / "model.json"
        if not path.exists():
            return None
        return mdl.load_model(path)

    def load_report(self, user_id: str) -> Optional[dict]:
        path = self._user_dir(user_id) / "report.json"
        if not path.exists():
            return None
        with open(path, encoding="utf-8") as f:
            return json.load(f)

    # --- session persistence ------------------------------------------------------

    def _save_meta(self, session: Session) -> None:
        meta = {
            "session_id": session.session_id,
            "user_id": session.user_id,
            "state": session.state.value,
            "scores": session.scores,
            "flagged": session.flagged,
            "marks": session.marks,
            "sentences": session.sentences,
            "changes": [
                {"sentence_index": c.sentence_index, "before": c.before, "after": c.after}
                for c in session.change_records
            ],
        }
        with open(self._session_dir(session.session_id) / "meta.json", "w", encoding="utf-8") as f:
            json.dump(meta, f, ensure_ascii=False, indent=1)
