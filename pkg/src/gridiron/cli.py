"""Command-line entry points for every pipeline stage.

Commands compute fully in memory and only then write their outputs, so a
failed invocation never leaves a partial file behind.
"""

from __future__ import annotations

import json
import sys
from datetime import date
from functools import wraps
from pathlib import Path

import click
import numpy as np

from .annotation import (
    annotate_corpus,
    cohen_kappa,
    evaluate,
    load_dictionaries,
    load_gold_corpus,
    save_gold_corpus,
)
from .corpus import DocumentStore, build_query_plan, tokenize, week_window
from .distribution import (
    FitResult,
    curve_export,
    fit_best,
    percentiles,
    registry_by_name,
    simulate,
)
from .embedding import (
    BROAD,
    ENCYCLOPEDIA,
    EmbeddingTable,
    TfIdfIndex,
    analogy,
    keyword_neighbors,
    train_skipgram,
)
from .insights import (
    BioStandardization,
    PipelineStores,
    build_insight,
    feature_vector,
    save_insights,
)
from .labeling import (
    AS_PRINTED,
    INVERTED,
    DEFAULT_MIN_OWNED,
    generate_labels,
    load_injuries,
    load_labels,
    load_stats,
    save_labels,
)
from .network import (
    STATES,
    FeatureScaler,
    evaluate_classifier,
    gradient_check,
    load_model,
    save_model,
    small_config,
    train,
)
from .projection import (
    ProjectionInput,
    TrainingRow,
    fit_ensemble,
    load_models,
    predict,
    rmse,
    save_models,
)
from .service import load_snapshot, serve
from .synth import WorldConfig, generate_world, load_roster, save_roster, write_world

DEFAULT_DIM = 12
DEFAULT_EPOCHS = 2
DEFAULT_DNN_EPOCHS = 40


def fail_cleanly(fn):
    """Print a diagnostic and exit nonzero instead of dumping a traceback."""

    @wraps(fn)
    def run(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except Exception as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return run


def load_config(path: str | None) -> dict[str, str]:
    """Flat ``key = value`` lines; blank lines and # comments ignored."""
    if path is None:
        return {}
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def resolve(flag, config: dict[str, str], key: str, default, cast=str):
    """Explicit flag beats the config file beats the built-in default."""
    if flag is not None:
        return flag
    if key in config:
        return cast(config[key])
    return default


@click.group()
def main():
    """Fantasy score projection pipeline."""


# --- corpus ---


@main.group()
def corpus():
    """Document store commands."""


@corpus.command("ingest")
@click.argument("inputs", nargs=-1, required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@fail_cleanly
def corpus_ingest(inputs, out):
    store = DocumentStore()
    stored = 0
    rejected = 0
    for path in inputs:
        with open(path, encoding="utf-8") as fh:
            records = [json.loads(line) for line in fh if line.strip()]
        report = store.ingest(records)
        stored += report.stored
        rejected += len(report.rejected)
        for rid, reason in report.rejected:
            click.echo(f"rejected {rid}: {reason}", err=True)
    store.save(out)
    click.echo(f"stored {stored} documents ({rejected} rejected) -> {out}")


@corpus.command("query")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--player", required=True)
@click.option("--team", default="")
@click.option("--league", multiple=True)
@click.option("--min-results", type=int, default=None)
@click.option("--week", type=int, default=None)
@click.option("--season-start", default=None)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@fail_cleanly
def corpus_query(store_path, player, team, league, min_results, week, season_start, config_path):
    config = load_config(config_path)
    min_results = resolve(min_results, config, "min_results", 50, int)
    season_start = resolve(season_start, config, "season_start", None)
    store = DocumentStore.load(store_path)
    time_range = None
    if week is not None:
        if season_start is None:
            raise ValueError("--week requires --season-start")
        window = week_window(date.fromisoformat(season_start), week)
        time_range = (window.start, window.end)
    plan = build_query_plan(player, team, list(league) or ["NFL"], min_results, time_range)
    result = store.execute_with_broadening(plan)
    click.echo(f"level {result.level_index}: {' AND '.join(result.level_terms)}")
    for doc in result.documents:
        click.echo(f"{doc.id}\t{doc.published_at.isoformat()}\t{doc.title}")
    click.echo(f"{len(result.documents)} documents")


# --- annotate ---


@main.group()
def annotate():
    """Dictionary entity annotation commands."""


@annotate.command("run")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--dictionaries", "dict_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@fail_cleanly
def annotate_run(store_path, dict_path, out):
    store = DocumentStore.load(store_path)
    dictionaries = load_dictionaries(dict_path)
    spans_by_doc = annotate_corpus(store.documents(), dictionaries)
    spans = [s for doc_spans in spans_by_doc.values() for s in doc_spans]
    save_gold_corpus(spans, out)
    click.echo(f"annotated {len(spans)} spans in {len(spans_by_doc)} documents -> {out}")


@annotate.command("kappa")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--a", "path_a", required=True, type=click.Path(exists=True))
@click.option("--b", "path_b", required=True, type=click.Path(exists=True))
@fail_cleanly
def annotate_kappa(store_path, path_a, path_b):
    store = DocumentStore.load(store_path)
    bodies = {d.id: d.body for d in store.documents()}
    result = cohen_kappa(
        load_gold_corpus(path_a, bodies), load_gold_corpus(path_b, bodies), store.documents()
    )
    click.echo(f"overall\t{result.overall:.6f}")
    for name, value in sorted(result.per_type.items()):
        click.echo(f"{name}\t{value:.6f}")


@annotate.command("score")
@click.option("--gold", "gold_path", required=True, type=click.Path(exists=True))
@click.option("--pred", "pred_path", required=True, type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["exact", "overlap"]), default="exact")
@fail_cleanly
def annotate_score(gold_path, pred_path, mode):
    result = evaluate(load_gold_corpus(pred_path), load_gold_corpus(gold_path), mode=mode)
    o = result.overall
    click.echo(f"precision\t{o.precision:.6f}")
    click.echo(f"recall\t{o.recall:.6f}")
    click.echo(f"f1\t{o.f1:.6f}")


# --- embed ---


@main.group()
def embed():
    """Skip-gram embedding commands."""


def _embedding_sentences(store: DocumentStore, role: str, dict_path: str | None):
    docs = store.documents()
    if role == BROAD:
        return [tokenize(d.title) + tokenize(d.body) for d in docs]
    if dict_path is None:
        raise ValueError("encyclopedia training requires --dictionaries")
    dictionaries = load_dictionaries(dict_path)
    spans_by_doc = annotate_corpus(docs, dictionaries)
    return [
        [tok for span in sorted(spans_by_doc[d.id]) for tok in tokenize(span.surface)]
        for d in docs
    ]


@embed.command("train")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--role", type=click.Choice([BROAD, ENCYCLOPEDIA]), default=BROAD)
@click.option("--dictionaries", "dict_path", type=click.Path(exists=True), default=None)
@click.option("--dim", type=int, default=None)
@click.option("--window", type=int, default=4)
@click.option("--epochs", type=int, default=None)
@click.option("--seed", type=int, default=0)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@fail_cleanly
def embed_train(store_path, out, role, dict_path, dim, window, epochs, seed, config_path):
    config = load_config(config_path)
    dim = resolve(dim, config, "dim", DEFAULT_DIM, int)
    epochs = resolve(epochs, config, "embed_epochs", DEFAULT_EPOCHS, int)
    store = DocumentStore.load(store_path)
    sentences = _embedding_sentences(store, role, dict_path)
    table = train_skipgram(sentences, dim, window=window, epochs=epochs, seed=seed, role=role)
    table.save(out)
    click.echo(f"trained {role} table: {len(table.vectors)} terms, dim {dim} -> {out}")


@embed.command("analogy")
@click.option("--table", "table_path", required=True, type=click.Path(exists=True))
@click.option("--top-n", type=int, default=5)
@click.argument("a")
@click.argument("b")
@click.argument("c")
@fail_cleanly
def embed_analogy(table_path, top_n, a, b, c):
    table = EmbeddingTable.load(table_path)
    for term, score in analogy(a, b, c, table, top_n=top_n):
        click.echo(f"{term}\t{score:.6f}")


@embed.command("neighbors")
@click.option("--table", "table_path", required=True, type=click.Path(exists=True))
@click.option("--top-n", type=int, default=5)
@click.argument("term")
@fail_cleanly
def embed_neighbors(table_path, top_n, term):
    table = EmbeddingTable.load(table_path)
    for neighbor, score in keyword_neighbors(term, table, top_n=top_n):
        click.echo(f"{neighbor}\t{score:.6f}")


# --- labels ---


@main.group()
def labels():
    """Boom/bust/injury/meaningful labeling commands."""


@labels.command("generate")
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True))
@click.option("--injuries", "injuries_path", type=click.Path(exists=True), default=None)
@click.option("--out", required=True, type=click.Path())
@click.option("--min-owned", type=float, default=DEFAULT_MIN_OWNED)
@click.option("--bust-direction", type=click.Choice([AS_PRINTED, INVERTED]), default=AS_PRINTED)
@fail_cleanly
def labels_generate(stats_path, injuries_path, out, min_owned, bust_direction):
    stats = load_stats(stats_path)
    reports = load_injuries(injuries_path) if injuries_path else []
    generated = generate_labels(
        stats, reports, min_owned=min_owned, bust_direction=bust_direction
    )
    save_labels(generated, out)
    booms = sum(l.boom for l in generated)
    busts = sum(l.bust for l in generated)
    click.echo(f"labeled {len(generated)} player-weeks ({booms} boom, {busts} bust) -> {out}")


# --- features file format shared by dnn and project commands ---


def save_features(rows, path):
    """``player_id,week,boom,bust,injury,meaningful,f0..fn`` CSV."""
    with open(path, "w", encoding="utf-8") as fh:
        for player_id, week, label_set, vec in rows:
            flags = (
                f"{int(label_set.boom)},{int(label_set.bust)},"
                f"{int(label_set.play_with_injury)},{int(label_set.meaningful)}"
            )
            values = ",".join(repr(float(v)) for v in vec)
            fh.write(f"{player_id},{week},{flags},{values}\n")


def load_features(path):
    keys, labels_by_state, vectors = [], {s: [] for s in STATES}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            keys.append((parts[0], int(parts[1])))
            for state, flag in zip(STATES, parts[2:6]):
                labels_by_state[state].append(int(flag))
            vectors.append([float(v) for v in parts[6:]])
    features = np.array(vectors, dtype=float)
    return keys, {s: np.array(v) for s, v in labels_by_state.items()}, features


# --- dnn ---


@main.group()
def dnn():
    """Deep classifier commands."""


@dnn.command("train")
@click.option("--features", "features_path", required=True, type=click.Path(exists=True))
@click.option("--state", type=click.Choice(list(STATES)), required=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--epochs", type=int, default=DEFAULT_DNN_EPOCHS)
@click.option("--learning-rate", type=float, default=0.01)
@click.option("--batch-size", type=int, default=32)
@click.option("--seed", type=int, default=0)
@fail_cleanly
def dnn_train(features_path, state, out, epochs, learning_rate, batch_size, seed):
    _, labels_by_state, features = load_features(features_path)
    scaler = FeatureScaler.fit(features)
    config = small_config(features.shape[1], state)
    net, history = train(
        config,
        scaler.transform(features),
        labels_by_state[state],
        learning_rate=learning_rate,
        epochs=epochs,
        batch_size=batch_size,
        seed=seed,
    )
    save_model(out, net, scaler=scaler, state=state)
    click.echo(f"trained {state} classifier, final loss {history[-1]:.6f} -> {out}")


@dnn.command("eval")
@click.option("--features", "features_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--threshold", type=float, default=0.5)
@fail_cleanly
def dnn_eval(features_path, model_path, threshold):
    _, labels_by_state, features = load_features(features_path)
    net, scaler, state = load_model(model_path)
    if state is None:
        raise ValueError("model file does not record its target state")
    x = scaler.transform(features) if scaler is not None else features
    metrics = evaluate_classifier(net, x, labels_by_state[state], threshold=threshold)
    click.echo(f"accuracy\t{metrics.accuracy:.6f}")
    click.echo(f"ppv\t{metrics.positive_predictive_value:.6f}")
    click.echo(f"npv\t{metrics.negative_predictive_value:.6f}")
    click.echo(f"predicted_positive_rate\t{metrics.predicted_positive_rate:.6f}")


@dnn.command("gradcheck")
@click.option("--input-dim", type=int, default=8)
@click.option("--samples", type=int, default=6)
@click.option("--seed", type=int, default=0)
@fail_cleanly
def dnn_gradcheck(input_dim, samples, seed):
    rng = np.random.default_rng(seed)
    features = rng.normal(size=(samples, input_dim))
    targets = rng.integers(0, 2, size=samples).astype(float)
    error = gradient_check(small_config(input_dim, "boom"), features, targets, seed=seed)
    click.echo(f"max_relative_error\t{error:.3e}")
    if error > 1e-4:
        raise ValueError(f"gradient check failed: {error:.3e} > 1e-4")


# --- project ---


@main.group()
def project():
    """Combined projection regression commands."""


def _probability_rows(features_path, dnn_dir):
    keys, _, features = load_features(features_path)
    probs = {}
    for state in STATES:
        net, scaler, _ = load_model(Path(dnn_dir) / f"{state}.npz")
        x = scaler.transform(features) if scaler is not None else features
        probs[state] = net.forward(x, mode="infer")
    return keys, probs


@project.command("fit")
@click.option("--features", "features_path", required=True, type=click.Path(exists=True))
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True))
@click.option("--dnn-dir", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@fail_cleanly
def project_fit(features_path, stats_path, dnn_dir, out):
    keys, probs = _probability_rows(features_path, dnn_dir)
    by_key = {(s.player_id, s.week): s for s in load_stats(stats_path)}
    rows = []
    for i, key in enumerate(keys):
        stat = by_key.get(key)
        if stat is None:
            continue
        feats = (stat.projected, *(float(probs[state][i]) for state in STATES))
        rows.append(TrainingRow(stat.position, feats, stat.actual))
    models = fit_ensemble(rows)
    save_models(models, out)
    click.echo(f"fitted {len(models)} regression models on {len(rows)} rows -> {out}")


@project.command("predict")
@click.option("--models", "models_path", required=True, type=click.Path(exists=True))
@click.option("--position", required=True)
@click.option("--baseline", type=float, required=True)
@click.option("--p-boom", type=float, required=True)
@click.option("--p-bust", type=float, required=True)
@click.option("--p-injury", type=float, required=True)
@click.option("--p-meaningful", type=float, required=True)
@fail_cleanly
def project_predict(models_path, position, baseline, p_boom, p_bust, p_injury, p_meaningful):
    models = load_models(models_path)
    value = predict(
        models,
        ProjectionInput("cli", 1, position, baseline, p_boom, p_bust, p_injury, p_meaningful),
    )
    click.echo(repr(float(value)))


@project.command("rmse")
@click.option("--models", "models_path", required=True, type=click.Path(exists=True))
@click.option("--features", "features_path", required=True, type=click.Path(exists=True))
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True))
@click.option("--dnn-dir", required=True, type=click.Path(exists=True))
@fail_cleanly
def project_rmse(models_path, features_path, stats_path, dnn_dir):
    models = load_models(models_path)
    keys, probs = _probability_rows(features_path, dnn_dir)
    by_key = {(s.player_id, s.week): s for s in load_stats(stats_path)}
    actuals, combined, baseline = [], [], []
    for i, key in enumerate(keys):
        stat = by_key.get(key)
        if stat is None:
            continue
        value = predict(
            models,
            ProjectionInput(
                stat.player_id,
                stat.week,
                stat.position,
                stat.projected,
                *(float(probs[state][i]) for state in STATES),
            ),
        )
        actuals.append(stat.actual)
        combined.append(value)
        baseline.append(stat.projected)
    click.echo(f"combined_rmse\t{rmse(combined, actuals):.6f}")
    click.echo(f"baseline_rmse\t{rmse(baseline, actuals):.6f}")


# --- dist ---


@main.group()
def dist():
    """Score distribution commands."""


def _parse_params(raw: str) -> tuple[float, ...]:
    return tuple(float(v) for v in raw.split(",") if v.strip())


@dist.command("fit")
@click.option("--values", "values_path", required=True, type=click.Path(exists=True))
@fail_cleanly
def dist_fit(values_path):
    values = [
        float(line) for line in Path(values_path).read_text().splitlines() if line.strip()
    ]
    from .distribution import ScoreSample

    best, candidates = fit_best(ScoreSample("cli", tuple(values)))
    click.echo(f"best\t{best.family}\t{','.join(repr(p) for p in best.params)}\t{best.loss:.6f}")
    for c in sorted(candidates, key=lambda c: c.loss):
        click.echo(f"candidate\t{c.family}\t{c.loss:.6f}\t{'ok' if c.converged else 'failed'}")


@dist.command("simulate")
@click.option("--family", required=True)
@click.option("--params", required=True)
@click.option("--n", type=int, default=1000)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), default=None)
@fail_cleanly
def dist_simulate(family, params, n, seed, out):
    if family not in registry_by_name():
        raise ValueError(f"unknown family {family!r}")
    fit = FitResult(family, _parse_params(params), 0.0, True, n)
    draws = simulate(fit, n=n, seed=seed)
    p15, p85 = percentiles(draws, (0.15, 0.85))
    click.echo(f"p15\t{p15!r}")
    click.echo(f"p85\t{p85!r}")
    if out:
        Path(out).write_text("".join(f"{float(v)!r}\n" for v in draws), encoding="utf-8")
        click.echo(f"{n} draws -> {out}")


@dist.command("curve")
@click.option("--family", required=True)
@click.option("--params", required=True)
@click.option("--lo", type=float, required=True)
@click.option("--hi", type=float, required=True)
@click.option("--pad", type=float, default=0.0)
@click.option("--points", type=int, default=200)
@click.option("--out", required=True, type=click.Path())
@fail_cleanly
def dist_curve(family, params, lo, hi, pad, points, out):
    if family not in registry_by_name():
        raise ValueError(f"unknown family {family!r}")
    fit = FitResult(family, _parse_params(params), 0.0, True, points)
    curve = curve_export(fit, sample_min=lo, sample_max=hi, sample_std=pad, points=points)
    Path(out).write_text(
        "".join(f"{float(x)!r},{float(y)!r}\n" for x, y in curve), encoding="utf-8"
    )
    click.echo(f"{points} curve points -> {out}")


# --- insight ---


@main.group()
def insight():
    """Full-pipeline insight commands."""


def _world_stores(world_dir, dim, epochs, min_results, keywords_k, seed):
    """Load a generated world and train its embedding tables in memory."""
    world = Path(world_dir)
    store = DocumentStore.load(world / "corpus.jsonl")
    docs = store.documents()
    dictionaries = load_dictionaries(world / "dictionaries.tsv")
    roster = load_roster(world / "roster.csv")
    stats = load_stats(world / "stats.csv")
    meta = json.loads((world / "world.json").read_text())

    broad = train_skipgram(
        [tokenize(d.title) + tokenize(d.body) for d in docs],
        dim, epochs=epochs, seed=seed, role=BROAD,
    )
    spans_by_doc = annotate_corpus(docs, dictionaries)
    encyclopedia = train_skipgram(
        [[t for s in sorted(spans_by_doc[d.id]) for t in tokenize(s.surface)] for d in docs],
        dim, epochs=epochs, seed=seed + 1, role=ENCYCLOPEDIA,
    )

    histories = {}
    baselines = {}
    for stat in stats:
        histories.setdefault(stat.player_id, []).append((stat.week, stat.actual))
        baselines[(stat.player_id, stat.week)] = stat.projected
    stores = PipelineStores(
        store=store,
        dictionaries=dictionaries,
        index=TfIdfIndex(docs),
        encyclopedia=encyclopedia,
        broad=broad,
        classifiers={},
        projections={},
        bios={p.player_id: p for p in roster},
        bio_standardization=BioStandardization.fit(roster),
        baselines=baselines,
        histories={pid: [v for _, v in sorted(rows)] for pid, rows in histories.items()},
        season_start=date.fromisoformat(meta["season_start"]),
        min_results=min_results,
        keywords_k=keywords_k,
    )
    return stores, stats, roster


@insight.command("features")
@click.option("--world", "world_dir", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--dim", type=int, default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--min-results", type=int, default=None)
@click.option("--keywords", type=int, default=None)
@click.option("--seed", type=int, default=0)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@fail_cleanly
def insight_features(world_dir, out, dim, epochs, min_results, keywords, seed, config_path):
    config = load_config(config_path)
    dim = resolve(dim, config, "dim", DEFAULT_DIM, int)
    epochs = resolve(epochs, config, "embed_epochs", DEFAULT_EPOCHS, int)
    min_results = resolve(min_results, config, "min_results", 50, int)
    keywords = resolve(keywords, config, "keywords", 20, int)
    stores, _, _ = _world_stores(world_dir, dim, epochs, min_results, keywords, seed)
    label_rows = load_labels(Path(world_dir) / "labels.csv")
    rows = []
    for label_set in label_rows:
        vec = feature_vector(stores, label_set.player_id, label_set.week)
        if vec is not None:
            rows.append((label_set.player_id, label_set.week, label_set, vec))
    save_features(rows, out)
    click.echo(f"assembled {len(rows)} feature rows -> {out}")


@insight.command("build")
@click.option("--world", "world_dir", required=True, type=click.Path(exists=True))
@click.option("--snapshot-dir", required=True, type=click.Path())
@click.option("--week", type=int, default=None, help="target week (default: last)")
@click.option("--dim", type=int, default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--dnn-epochs", type=int, default=None)
@click.option("--min-results", type=int, default=None)
@click.option("--keywords", type=int, default=None)
@click.option("--simulations", type=int, default=None)
@click.option("--seed", type=int, default=0)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@fail_cleanly
def insight_build(world_dir, snapshot_dir, week, dim, epochs, dnn_epochs, min_results,
                  keywords, simulations, seed, config_path):
    config = load_config(config_path)
    dim = resolve(dim, config, "dim", DEFAULT_DIM, int)
    epochs = resolve(epochs, config, "embed_epochs", DEFAULT_EPOCHS, int)
    dnn_epochs = resolve(dnn_epochs, config, "dnn_epochs", DEFAULT_DNN_EPOCHS, int)
    min_results = resolve(min_results, config, "min_results", 50, int)
    keywords = resolve(keywords, config, "keywords", 20, int)
    simulations = resolve(simulations, config, "simulations", 1000, int)

    stores, stats, roster = _world_stores(world_dir, dim, epochs, min_results, keywords, seed)
    label_rows = load_labels(Path(world_dir) / "labels.csv")
    target_week = week if week is not None else max(s.week for s in stats)

    rows = []
    for label_set in label_rows:
        vec = feature_vector(stores, label_set.player_id, label_set.week)
        if vec is not None:
            rows.append((label_set.player_id, label_set.week, label_set, vec))
    if not rows:
        raise ValueError("no player-week produced a feature row")
    features = np.array([vec for _, _, _, vec in rows])
    scaler = FeatureScaler.fit(features)
    scaled = scaler.transform(features)

    classifiers = {}
    for i, state in enumerate(STATES):
        targets = np.array(
            [
                [ls.boom, ls.bust, ls.play_with_injury, ls.meaningful][i]
                for _, _, ls, _ in rows
            ],
            dtype=float,
        )
        net, _ = train(
            small_config(features.shape[1], state), scaled, targets,
            epochs=dnn_epochs, seed=seed + i,
        )
        classifiers[state] = (net, scaler)
    stores.classifiers = classifiers

    by_key = {(s.player_id, s.week): s for s in stats}
    training_rows = []
    for i, (player_id, row_week, _, _) in enumerate(rows):
        stat = by_key[(player_id, row_week)]
        probs = {
            state: float(classifiers[state][0].forward(scaled[i : i + 1], mode="infer")[0])
            for state in STATES
        }
        training_rows.append(
            TrainingRow(
                stat.position,
                (stat.projected, probs["boom"], probs["bust"], probs["injury"], probs["meaningful"]),
                stat.actual,
            )
        )
    stores.projections = fit_ensemble(training_rows)

    insights = [
        build_insight(stores, bio.player_id, target_week, seed=seed, simulations=simulations)
        for bio in roster
    ]

    out = Path(snapshot_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_roster(roster, out / "roster.csv")
    save_insights(insights, out / "insights.jsonl")
    click.echo(f"built {len(insights)} insights for week {target_week} -> {out}")


# --- serve ---


@main.command("serve")
@click.option("--snapshot-dir", required=True, type=click.Path(exists=True))
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
@fail_cleanly
def serve_command(snapshot_dir, host, port):
    snapshot = load_snapshot(snapshot_dir)
    click.echo(f"serving snapshot {snapshot.version} on {host}:{port}")
    serve(snapshot, host=host, port=port)


# --- synth ---


@main.group()
def synth():
    """Synthetic world commands."""


@synth.command("generate")
@click.option("--out", required=True, type=click.Path())
@click.option("--players", type=int, default=None)
@click.option("--teams", type=int, default=None)
@click.option("--weeks", type=int, default=None)
@click.option("--docs-per-player-week", type=int, default=None)
@click.option("--boom-rate", type=float, default=None)
@click.option("--bust-rate", type=float, default=None)
@click.option("--tone-accuracy", type=float, default=None)
@click.option("--seed", type=int, default=0)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@fail_cleanly
def synth_generate(out, players, teams, weeks, docs_per_player_week, boom_rate, bust_rate,
                   tone_accuracy, seed, config_path):
    config = load_config(config_path)
    world_config = WorldConfig(
        player_count=resolve(players, config, "players", 50, int),
        team_count=resolve(teams, config, "teams", 10, int),
        weeks=resolve(weeks, config, "weeks", 10, int),
        docs_per_player_week=resolve(docs_per_player_week, config, "docs_per_player_week", 4, int),
        boom_rate=resolve(boom_rate, config, "boom_rate", 0.14, float),
        bust_rate=resolve(bust_rate, config, "bust_rate", 0.30, float),
        tone_accuracy=resolve(tone_accuracy, config, "tone_accuracy", 0.8, float),
        seed=seed,
    )
    world = generate_world(world_config)
    write_world(world, out)
    click.echo(
        f"world seed {seed}: {world_config.player_count} players, "
        f"boom {world.realized_boom_rate:.3f}, bust {world.realized_bust_rate:.3f} -> {out}"
    )


if __name__ == "__main__":
    main()
