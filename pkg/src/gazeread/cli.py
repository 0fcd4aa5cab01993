"""Command line interface for offline replay, training, and reports."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import click
import numpy as np

from . import features as feats
from . import linguistics as ling
from . import model as mdl
from . import readability as rdb
from .gaze import IvtParams, detect_fixations, read_gaze_log
from .layout import read_layout, resolve_fixations
from .service import ReadingService, ServiceConfig
from .simplify import MockClient, build_prompt, replace_sentence, simplify as run_simplify


def _load_lexicons(lexicon_dir):
    if lexicon_dir:
        d = Path(lexicon_dir)
        return (ling.Lexicon.from_csv(d / "aoa.csv", "aoa"),
                ling.Lexicon.from_csv(d / "zipf.csv", "zipf"))
    return ling.load_fixture_lexicons()


def _load_config(config) -> ServiceConfig:
    return ServiceConfig.from_file(config) if config else ServiceConfig()


def common_options(f):
    f = click.option("--seed", type=int, default=0, show_default=True)(f)
    f = click.option("--config", type=click.Path(exists=True), default=None,
                     help="service config JSON")(f)
    f = click.option("--lexicon-dir", type=click.Path(exists=True), default=None,
                     help="directory with aoa.csv and zipf.csv")(f)
    return f


@click.group()
def main():
    """Gaze-driven adaptive reading toolkit."""


@main.command("detect-fixations")
@click.argument("gaze_log", type=click.Path(exists=True))
@click.option("--layout", type=click.Path(exists=True), default=None,
              help="resolve fixations to word indices against this layout")
@click.option("-o", "--output", type=click.Path(), required=True)
@common_options
def detect_fixations_cmd(gaze_log, layout, output, seed, config, lexicon_dir):
    """Detect fixations in a gaze log, optionally mapping them to words."""
    cfg = _load_config(config)
    samples = read_gaze_log(gaze_log)
    fixations = detect_fixations(samples, cfg.ivt)
    if layout:
        doc = read_layout(layout)
        fixations = resolve_fixations(fixations, doc, cfg.snap_radius)
    with open(output, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["start_ms", "end_ms", "duration_ms", "cx_px", "cy_px", "word_index"])
        for fx in fixations:
            w.writerow([fx.start, fx.end, fx.duration, fx.cx, fx.cy,
                        "" if fx.word_index is None else fx.word_index])
    click.echo(f"{len(fixations)} fixations -> {output}")


@main.command("extract-features")
@click.option("--layout", type=click.Path(exists=True), required=True)
@click.option("--gaze", type=click.Path(exists=True), required=True)
@click.option("--marks", default=None, help="comma-separated 0/1 marks (1 = not understood)")
@click.option("-o", "--output", type=click.Path(), required=True)
@common_options
def extract_features_cmd(layout, gaze, marks, output, seed, config, lexicon_dir):
    """Build the per-sentence feature matrix CSV from a gaze log and layout."""
    cfg = _load_config(config)
    aoa, zipf = _load_lexicons(lexicon_dir)
    doc = read_layout(layout)
    fixations = resolve_fixations(detect_fixations(read_gaze_log(gaze), cfg.ivt), doc, cfg.snap_radius)
    X = feats.build_matrix(doc, fixations, aoa, zipf)
    labels = None
    if marks is not None:
        flags = [v.strip() in ("1", "true") for v in marks.split(",")]
        if len(flags) != X.shape[0]:
            raise click.ClickException(f"marks length {len(flags)} != {X.shape[0]} sentences")
        labels = [not m for m in flags]
    feats.write_matrix_csv(output, X, labels)
    click.echo(f"{X.shape[0]}x{X.shape[1]} matrix -> {output}")


@main.command("train")
@click.option("--features", "features_csv", type=click.Path(exists=True), required=True,
              help="labeled feature matrix CSV")
@click.option("--model-out", type=click.Path(), required=True)
@click.option("--report-out", type=click.Path(), default=None)
@click.option("--figure-out", type=click.Path(), default=None,
              help="PNG bar chart of surviving features")
@common_options
def train_cmd(features_csv, model_out, report_out, figure_out, seed, config, lexicon_dir):
    """7:3 split, 48-cell grid search with backward selection, held-out report."""
    cfg = _load_config(config)
    X, y = feats.read_matrix_csv(features_csv)
    if y is None:
        raise click.ClickException("feature matrix has no label column")
    train_idx, test_idx = mdl.split_dataset(X, y, seed=seed)
    model, search = mdl.grid_search_train(X[train_idx], y[train_idx], k=cfg.folds,
                                          seed=seed, n_trees=cfg.n_trees,
                                          learning_rate=cfg.learning_rate)
    preds = mdl.classify_threshold(mdl.predict_full(model, X[test_idx]))
    report = mdl.weighted_metrics(y[test_idx], preds)
    report.selected_features = list(search.selected_features)
    mdl.save_model(model_out, model)
    click.echo(f"model -> {model_out}")
    click.echo(f"held-out weighted F1 {report.weighted_f1:.3f}, "
               f"precision {report.weighted_precision:.3f}, recall {report.weighted_recall:.3f}")
    if report_out:
        with open(report_out, "w", encoding="utf-8") as f:
            json.dump(report.to_dict(), f, indent=1)
    if figure_out:
        _selection_figure(search, figure_out)
        click.echo(f"figure -> {figure_out}")


def _selection_figure(search: mdl.GridSearchResult, path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    counts = np.zeros(feats.N_FEATURES)
    for _, selected, _ in search.cells:
        for f in selected:
            counts[f] += 1
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.bar(np.arange(1, feats.N_FEATURES + 1), counts, color="#4878cf")
    ax.set_xlabel("feature number")
    ax.set_ylabel("grid cells keeping the feature")
    ax.set_xticks(np.arange(1, feats.N_FEATURES + 1))
    ax.set_title("feature survival across the hyperparameter grid")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


@main.command("predict")
@click.option("--model", "model_path", type=click.Path(exists=True), required=True)
@click.option("--features", "features_csv", type=click.Path(exists=True), required=True)
@click.option("-o", "--output", type=click.Path(), required=True)
@common_options
def predict_cmd(model_path, features_csv, output, seed, config, lexicon_dir):
    """Score sentences with a trained model."""
    model = mdl.load_model(model_path)
    X, _ = feats.read_matrix_csv(features_csv)
    scores = mdl.predict_full(model, X)
    flags = mdl.classify_threshold(scores)
    with open(output, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["sentence_index", "score", "understood"])
        for i, (s, u) in enumerate(zip(scores, flags)):
            w.writerow([i, repr(float(s)), int(u)])
    click.echo(f"{len(scores)} scores -> {output}")


@main.command("simplify")
@click.option("--sentences", "sentences_path", type=click.Path(exists=True), required=True,
              help="JSON array of sentence strings")
@click.option("--indices", required=True, help="comma-separated sentence indices to simplify")
@click.option("-o", "--output", type=click.Path(), required=True)
@common_options
def simplify_cmd(sentences_path, indices, output, seed, config, lexicon_dir):
    """Simplify chosen sentences with the configured client (mock by default)."""
    cfg = _load_config(config)
    client = cfg.make_client()
    with open(sentences_path, encoding="utf-8") as f:
        sentences = json.load(f)
    changes = []
    for idx in [int(v) for v in indices.split(",")]:
        res = run_simplify(build_prompt(idx, sentences[idx]), client)
        sentences, record = replace_sentence(sentences, idx, res.simplified)
        changes.append({"sentence_index": idx, "before": record.before, "after": record.after})
    with open(output, "w", encoding="utf-8") as f:
        json.dump({"sentences": sentences, "changes": changes}, f, indent=1, ensure_ascii=False)
    click.echo(f"{len(changes)} replacements -> {output}")


@main.command("evaluate")
@click.option("--pairs", "pairs_path", type=click.Path(exists=True), required=True,
              help="JSON list of {original, simplified} pairs")
@click.option("--out-dir", type=click.Path(), required=True)
@common_options
def evaluate_cmd(pairs_path, out_dir, seed, config, lexicon_dir):
    """Before/after readability table (CSV + PNG) for a simplification corpus."""
    aoa, zipf = _load_lexicons(lexicon_dir)
    pairs = rdb.read_pair_corpus(pairs_path)
    report = rdb.compare_report(pairs, aoa, zipf)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "readability.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["side"] + rdb.METRIC_NAMES)
        w.writerow(["original"] + [repr(v) for v in report.original.as_row()])
        w.writerow(["simplified"] + [repr(v) for v in report.simplified.as_row()])
        w.writerow(["delta"] + [repr(v) for v in report.deltas])
    _readability_figure(report, out / "readability.png")
    click.echo(report.to_text())
    click.echo(f"report -> {out / 'readability.csv'}, {out / 'readability.png'}")


def _readability_figure(report: rdb.ComparisonReport, path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    x = np.arange(len(rdb.METRIC_NAMES))
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(x - 0.2, report.original.as_row(), width=0.4, label="original", color="#c44e52")
    ax.bar(x + 0.2, report.simplified.as_row(), width=0.4, label="simplified", color="#55a868")
    ax.set_xticks(x)
    ax.set_xticklabels(rdb.METRIC_NAMES)
    ax.set_ylabel("corpus mean")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


@main.command("replay")
@click.option("--layout", type=click.Path(exists=True), required=True)
@click.option("--gaze", type=click.Path(exists=True), required=True)
@click.option("--user", "user_id", required=True)
@click.option("--store", type=click.Path(), required=True, help="service store directory")
@click.option("--marks", default=None, help="comma-separated 0/1 marks to submit")
@click.option("--out-dir", type=click.Path(), required=True)
@common_options
def replay_cmd(layout, gaze, user_id, store, marks, out_dir, seed, config, lexicon_dir):
    """Drive the full session pipeline from recorded files."""
    cfg = _load_config(config)
    aoa, zipf = _load_lexicons(lexicon_dir)
    service = ReadingService(store, aoa, zipf, cfg)
    doc = read_layout(layout)
    samples = read_gaze_log(gaze)
    session_id = service.create_session(user_id, doc)
    service.ingest_gaze(session_id, samples)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    if marks is not None:
        flags = [v.strip() in ("1", "true") for v in marks.split(",")]
        service.submit_marks(session_id, flags)
        click.echo(f"marks stored for {user_id}")

    if service.load_model(user_id) is None:
        click.echo("user has no trained model; skipping scoring")
    else:
        scores, flagged = service.finalize_and_score(session_id)
        results, errors = service.simplify_flagged(session_id, MockClient.with_bundled_pairs())
        with open(out / "scores.csv", "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f)
            w.writerow(["sentence_index", "score", "flagged"])
            for i, s in enumerate(scores):
                w.writerow([i, repr(s), int(i in flagged)])
        with open(out / "document.json", "w", encoding="utf-8") as f:
            json.dump(service.get_document(session_id), f, indent=1, ensure_ascii=False)
        click.echo(f"{len(flagged)} flagged, {len(results)} simplified, {len(errors)} errors")

    _fixation_figure(doc, samples, cfg, out / "fixations.png")
    click.echo(f"outputs -> {out}")


def _fixation_figure(doc, samples, cfg: ServiceConfig, path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Rectangle

    fixations = detect_fixations(samples, cfg.ivt)
    fig, ax = plt.subplots(figsize=(10, 6))
    for box in doc.words:
        ax.add_patch(Rectangle((box.x, box.y), box.w, box.h,
                               fill=False, edgecolor="#bbbbbb", linewidth=0.6))
    if fixations:
        xs = [f.cx for f in fixations]
        ys = [f.cy for f in fixations]
        sizes = [max(f.duration / 4, 8) for f in fixations]
        ax.scatter(xs, ys, s=sizes, alpha=0.5, color="#4878cf")
        ax.plot(xs, ys, linewidth=0.5, alpha=0.4, color="#4878cf")
    ax.invert_yaxis()
    ax.set_aspect("equal")
    ax.set_title(f"{len(fixations)} fixations over {doc.doc_id}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


if __name__ == "__main__":
    main()
