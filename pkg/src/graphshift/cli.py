"""Command-line interface.

Subcommands: synth (fixture pair generation), ppmi (structure cache),
train, eval, gradcheck. Exit codes: 0 success, 1 usage/config error,
2 data error, 3 numerical failure.

Config precedence for train: built-in defaults < --config key=value file
< explicit flags. Output directories are built in a temp sibling and renamed
into place on success, so failed runs never leave partial outputs.
"""
import argparse
import dataclasses
import datetime
import json
import os
import shutil
import sys
import time

import numpy as np

from . import __version__, backend, model, trainer
from .errors import ConfigError, DataError, NumericalError, StaleCacheError, UsageError
from .ppmi import (graph_structure_hash, load_ppmi, reconstruct, save_ppmi,
                   walk_config_hash)
from .graph_io import (DomainPair, SyntheticConfig, generate_pair, load_attr_names,
                       load_graph, split_labels, write_attr_file, write_edge_file,
                       write_label_file)
from .selfcheck import GROUPS, run_gradcheck
from .trainer import TrainConfig, config_hash, fit, variant_name, write_epoch_csv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _utcnow():
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _atomic_begin(out, force):
    out = os.path.abspath(out)
    if os.path.exists(out) and not force:
        raise ConfigError(f"output {out} already exists (pass --force to replace)")
    tmp = out + f".tmp{os.getpid()}"
    if os.path.exists(tmp):
        shutil.rmtree(tmp)
    os.makedirs(tmp)
    return tmp, out


def _atomic_commit(tmp, out):
    if os.path.exists(out):
        shutil.rmtree(out)
    os.replace(tmp, out)


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------- config I/O

_FIELDS = {f.name: f for f in dataclasses.fields(TrainConfig)}
_DEFAULTS = dataclasses.asdict(TrainConfig())
_BOOL_FIELDS = {n for n, v in _DEFAULTS.items() if isinstance(v, bool)}
_INT_FIELDS = {n for n, v in _DEFAULTS.items() if isinstance(v, int) and not isinstance(v, bool)}
_FLOAT_FIELDS = {n for n, v in _DEFAULTS.items() if isinstance(v, float)}
_OPT_FLOAT_FIELDS = {"shift_step"}


def _coerce(key, raw):
    if key not in _FIELDS:
        raise ConfigError(f"unknown config key {key!r}")
    raw = raw.strip()
    try:
        if key in _BOOL_FIELDS:
            low = raw.lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if key in _INT_FIELDS:
            return int(raw)
        if key in _FLOAT_FIELDS:
            return float(raw)
        if key in _OPT_FLOAT_FIELDS:
            return None if raw.lower() == "none" else float(raw)
    except ValueError:
        raise ConfigError(f"cannot parse config value {key}={raw!r}") from None
    return raw  # string field


def read_config_file(path):
    """Flat key=value lines; blank lines and # comments allowed."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, raw = line.split("=", 1)
            out[key.strip()] = _coerce(key.strip(), raw)
    return out


def _resolve_config(args):
    merged = dataclasses.asdict(TrainConfig())
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    for name in _FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            merged[name] = _coerce(name, str(v)) if isinstance(v, str) else v
    for flag, field in (("wo_neg", "use_neg"), ("wo_shift", "use_shift"),
                        ("wo_at", "use_at"), ("wo_pl", "use_pl")):
        if getattr(args, flag, False):
            merged[field] = False
    return TrainConfig(**merged)


def _add_config_flags(p):
    for name in ("epochs", "hidden_dim", "embed_dim", "clf_hidden", "walks_per_node",
                 "walk_length", "window", "seed", "eval_every", "checkpoint_every"):
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=int, default=None)
    for name in ("lr", "weight_decay", "dropout", "lambda1", "lambda2_value",
                 "eps", "alpha", "beta", "shift_step"):
        p.add_argument("--" + name.replace("_", "-"), dest=name, type=float, default=None)
    p.add_argument("--lambda2-mode", dest="lambda2_mode", choices=("linear", "constant"), default=None)
    p.add_argument("--shift-mode", dest="shift_mode", choices=model.SHIFT_MODES, default=None)
    p.add_argument("--shift-position", dest="shift_position", choices=model.SHIFT_POSITIONS, default=None)
    p.add_argument("--count-self", dest="count_self", choices=("true", "false"), default=None)
    p.add_argument("--wo-neg", action="store_true", help="ablation: raw adjacency instead of PPMI")
    p.add_argument("--wo-shift", action="store_true", help="ablation: no source shift parameters")
    p.add_argument("--wo-at", action="store_true", help="ablation: no adversarial alignment")
    p.add_argument("--wo-pl", action="store_true", help="ablation: no pseudo-label loss")
    p.add_argument("--config", help="key=value config file (defaults < file < flags)")


# ---------------------------------------------------------------- subcommands

def cmd_synth(args):
    if args.classes < 2:
        raise ConfigError("--classes must be >= 2 (downstream needs at least two classes)")
    cfg = SyntheticConfig(
        n_nodes=args.nodes, n_classes=args.classes, attr_dim=args.dim,
        p_in=args.p_in, p_out=args.p_out,
        p_in_target=args.p_in_target, p_out_target=args.p_out_target,
        mean_offset=args.offset, cov_scale=args.cov_scale, noise_std=args.noise_std,
        seed=args.seed)
    pair = generate_pair(cfg)
    tmp, out = _atomic_begin(args.out, args.force)
    try:
        for name, g in (("source", pair.source), ("target", pair.target)):
            write_edge_file(os.path.join(tmp, f"{name}_edges.txt"), g.adjacency)
            write_attr_file(os.path.join(tmp, f"{name}_attrs.txt"), g.attributes)
            write_label_file(os.path.join(tmp, f"{name}_labels.txt"), g.labels)
        spec = dataclasses.asdict(cfg)
        spec.pop("class_means")
        _write_json(os.path.join(tmp, "synth.json"), {
            "generator": spec, "created_utc": _utcnow(), "version": __version__})
        _atomic_commit(tmp, out)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    print(f"wrote synthetic pair to {out}")
    return 0


def cmd_ppmi(args):
    cfg = _resolve_config(args)
    g = load_graph(args.edges, args.attrs)
    wcfg = cfg.walk_config(args.domain)
    pm = reconstruct(g, wcfg, use_ppmi=cfg.use_neg, backend_name=args.backend)
    out = os.path.abspath(args.out)
    if os.path.exists(out) and not args.force:
        raise ConfigError(f"output {out} already exists (pass --force to replace)")
    tmp = out + f".tmp{os.getpid()}"
    save_ppmi(tmp, pm,
                       graph_sha=graph_structure_hash(g.adjacency),
                       walk_sha=walk_config_hash(wcfg, cfg.use_neg))
    os.replace(tmp + ".meta.json", out + ".meta.json")
    os.replace(tmp, out)
    print(f"wrote structure cache ({pm.P.nnz} entries, {pm.n_nodes} nodes) to {out}")
    return 0


def _load_cached(path, g, cfg, domain):
    pm, meta = load_ppmi(path)
    want_graph = graph_structure_hash(g.adjacency)
    want_walk = walk_config_hash(cfg.walk_config(domain), cfg.use_neg)
    if meta is None:
        raise StaleCacheError(f"{path}: missing meta sidecar; regenerate with 'graphshift ppmi'")
    if meta.get("graph_sha") != want_graph or meta.get("walk_sha") != want_walk:
        raise StaleCacheError(
            f"{path}: cache was built for a different graph or walk config; "
            f"regenerate with 'graphshift ppmi --domain {domain}'")
    if pm.n_nodes != g.n_nodes:
        raise StaleCacheError(f"{path}: node count {pm.n_nodes} != graph {g.n_nodes}")
    return pm


def _payload_pair(payload):
    d = payload["data"]
    source = load_graph(d["source_edges"], d["source_attrs"], d.get("source_labels"))
    target = load_graph(d["target_edges"], d["target_attrs"], d.get("target_labels"))
    if d.get("source_attr_names") or d.get("target_attr_names"):
        if not (d.get("source_attr_names") and d.get("target_attr_names")):
            raise ConfigError("attribute-name files must be given for both domains")
        from .graph_io import union_align
        pair = union_align(source, target,
                           load_attr_names(d["source_attr_names"]),
                           load_attr_names(d["target_attr_names"]))
    else:
        pair = DomainPair(source, target)
    if payload.get("label_rate") is not None:
        split_seed = payload.get("split_seed")
        if split_seed is None:
            split_seed = payload["cfg"]["seed"]
        pair = DomainPair(split_labels(pair.source, payload["label_rate"], split_seed), pair.target)
    return pair


def _train_single(payload):
    """One complete training run; standalone so --jobs can fork it into workers."""
    cfg = TrainConfig(**payload["cfg"])
    pair = _payload_pair(payload)
    pm_s = pm_t = None
    if payload.get("ppmi_source"):
        pm_s = _load_cached(payload["ppmi_source"], pair.source, cfg, "source")
    if payload.get("ppmi_target"):
        pm_t = _load_cached(payload["ppmi_target"], pair.target, cfg, "target")

    started = _utcnow()
    t0 = time.perf_counter()
    tmp, out = _atomic_begin(payload["out"], payload.get("force", False))
    try:
        callbacks = []
        if cfg.checkpoint_every > 0:
            def save_inter(state, report):
                if report.epoch % cfg.checkpoint_every == 0:
                    model.save_checkpoint(os.path.join(tmp, f"ckpt_e{report.epoch:04d}.npz"),
                                          state.enc, state.shift, state.head,
                                          config_hash(cfg), json.dumps(dataclasses.asdict(cfg)))
            callbacks.append(save_inter)
        if payload.get("dump_pseudo"):
            os.makedirs(os.path.join(tmp, "pseudo"))
        result = _fit_with_dumps(pair, cfg, pm_s, pm_t, tmp, callbacks,
                                 payload.get("dump_pseudo", False))
        write_epoch_csv(os.path.join(tmp, "epochs.csv"), result.reports)
        model.save_checkpoint(os.path.join(tmp, "final.npz"), result.enc, result.shift,
                              result.head, result.cfg_hash,
                              json.dumps(dataclasses.asdict(cfg)))
        last = result.reports[-1]
        summary = {
            "variant": variant_name(cfg),
            "config_hash": result.cfg_hash,
            "seed": cfg.seed,
            "epochs": cfg.epochs,
            "final": {
                "epoch": last.epoch, "micro_f1": last.micro_f1, "macro_f1": last.macro_f1,
                "target_entropy": last.target_entropy, "l_sup": last.l_sup,
                "l_at": last.l_at, "l_pl": last.l_pl,
            },
            "wall_time_s": time.perf_counter() - t0,
        }
        _write_json(os.path.join(tmp, "summary.json"), summary)
        _write_json(os.path.join(tmp, "manifest.json"), {
            "package": "graphshift", "version": __version__, "command": "train",
            "argv": payload.get("argv", []),
            "created_start_utc": started, "created_end_utc": _utcnow(),
            "backend": backend.resolve(),
            "config": dataclasses.asdict(cfg), "config_hash": result.cfg_hash,
            "variant": variant_name(cfg),
            "inputs": {**payload["data"],
                       **{k: payload[k] for k in ("ppmi_source", "ppmi_target")
                          if payload.get(k)}},
            "label_rate": payload.get("label_rate"),
            "outputs": sorted(os.listdir(tmp)),
        })
        _atomic_commit(tmp, out)
        return summary
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise


def _fit_with_dumps(pair, cfg, pm_s, pm_t, tmp, callbacks, dump_pseudo):
    from .objectives import refresh_pseudo_state

    def cb(state, report):
        for c in callbacks:
            c(state, report)
        if dump_pseudo and cfg.use_pl:
            probs_s = model.predict_probs(state.pm_source.S, state.pair.source.attributes,
                                          state.enc, state.head,
                                          state.shift if cfg.use_shift else None,
                                          cfg.shift_position)
            probs_t = model.predict_probs(state.pm_target.S, state.pair.target.attributes,
                                          state.enc, state.head)
            ps = refresh_pseudo_state(state.pm_source.P, state.pm_target.P, probs_s, probs_t,
                                      state.pair.source.labels, state.pair.source.labeled_mask,
                                      state.n_classes, cfg.alpha, cfg.beta)
            for name, dom in (("source", ps.source), ("target", ps.target)):
                path = os.path.join(tmp, "pseudo", f"{name}_e{report.epoch:04d}.csv")
                with open(path, "w") as fh:
                    fh.write("node,pseudo_label,raw_score,weight\n")
                    for n, y, w, a in zip(dom.nodes, dom.y_hat, dom.raw, dom.weights):
                        fh.write(f"{n},{y},{float(w)!r},{float(a)!r}\n")

    return fit(pair, cfg, pm_s, pm_t, cb)


def cmd_train(args):
    cfg = _resolve_config(args)
    if args.data_dir:
        d = args.data_dir
        data = {
            "source_edges": os.path.join(d, "source_edges.txt"),
            "source_attrs": os.path.join(d, "source_attrs.txt"),
            "source_labels": os.path.join(d, "source_labels.txt"),
            "target_edges": os.path.join(d, "target_edges.txt"),
            "target_attrs": os.path.join(d, "target_attrs.txt"),
        }
        tl = os.path.join(d, "target_labels.txt")
        if os.path.exists(tl):
            data["target_labels"] = tl
    else:
        need = ("source_edges", "source_attrs", "target_edges", "target_attrs")
        if any(getattr(args, n) is None for n in need):
            raise UsageError("pass --data-dir or all of --source-edges/--source-attrs/"
                             "--target-edges/--target-attrs")
        data = {n: getattr(args, n) for n in need}
        for opt in ("source_labels", "target_labels", "source_attr_names", "target_attr_names"):
            if getattr(args, opt) is not None:
                data[opt] = getattr(args, opt)
    if "source_labels" not in data:
        raise UsageError("source labels are required for training")

    base = {
        "data": data, "cfg": dataclasses.asdict(cfg),
        "label_rate": args.label_rate, "split_seed": args.split_seed,
        "ppmi_source": args.ppmi_source, "ppmi_target": args.ppmi_target,
        "dump_pseudo": args.dump_pseudo, "force": args.force,
        "argv": sys.argv[1:],
    }
    if args.seeds is None:
        base["out"] = args.out
        summary = _train_single(base)
        print(json.dumps(summary["final"], sort_keys=True))
        return 0

    # seed panel: N runs with seeds seed, seed+1, ...
    if args.seeds < 1:
        raise ConfigError("--seeds must be >= 1")
    tmp, out = _atomic_begin(args.out, args.force)
    try:
        payloads = []
        for k in range(args.seeds):
            p = dict(base)
            p["cfg"] = dict(base["cfg"], seed=cfg.seed + k)
            p["out"] = os.path.join(tmp, f"seed_{cfg.seed + k}")
            p["force"] = False
            payloads.append(p)
        if args.jobs and args.jobs > 1:
            import concurrent.futures as cf
            import multiprocessing as mp
            with cf.ProcessPoolExecutor(max_workers=args.jobs,
                                        mp_context=mp.get_context("spawn")) as ex:
                summaries = list(ex.map(_train_single, payloads))
        else:
            summaries = [_train_single(p) for p in payloads]
        micro = [s["final"]["micro_f1"] for s in summaries]
        macro = [s["final"]["macro_f1"] for s in summaries]
        panel = {
            "variant": summaries[0]["variant"],
            "seeds": [s["seed"] for s in summaries],
            "micro_f1": {"mean": float(np.mean(micro)), "std": float(np.std(micro)),
                         "per_seed": micro},
            "macro_f1": {"mean": float(np.mean(macro)), "std": float(np.std(macro)),
                         "per_seed": macro},
        }
        _write_json(os.path.join(tmp, "panel_summary.json"), panel)
        _atomic_commit(tmp, out)
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    print(json.dumps({"micro_f1_mean": panel["micro_f1"]["mean"],
                      "macro_f1_mean": panel["macro_f1"]["mean"]}, sort_keys=True))
    return 0


def cmd_eval(args):
    enc, shift, head, cfg_hash, cfg_json = model.load_checkpoint(args.checkpoint)
    target = load_graph(args.target_edges, args.target_attrs, args.target_labels)
    if target.attr_dim != enc.W1.shape[0]:
        raise DataError(f"checkpoint expects {enc.W1.shape[0]} attribute columns, "
                        f"data has {target.attr_dim}")
    if args.ppmi_target:
        if not cfg_json:
            raise ConfigError("checkpoint carries no config; cannot validate the cache")
        cfg = TrainConfig(**json.loads(cfg_json))
        pm_t = _load_cached(args.ppmi_target, target, cfg, "target")
    else:
        if not cfg_json:
            raise ConfigError("checkpoint carries no embedded config; pass --ppmi-target")
        cfg = TrainConfig(**json.loads(cfg_json))
        pm_t = reconstruct(target, cfg.walk_config("target"), cfg.use_neg)

    probs = model.predict_probs(pm_t.S, target.attributes, enc, head)
    n_classes = head.Wc2.shape[1]
    out = {"checkpoint": os.path.abspath(args.checkpoint), "config_hash": cfg_hash,
           "n_nodes": target.n_nodes}
    if target.labels is not None and (target.labels >= 0).any():
        micro, macro = trainer.evaluate(probs, target.labels, n_classes)
        out["micro_f1"], out["macro_f1"] = micro, macro
    elif args.dump_embeddings is None:
        raise ConfigError("no target labels to score and no --dump-embeddings requested")

    if args.dump_embeddings:
        tmp, dump_out = _atomic_begin(args.dump_embeddings, args.force)
        try:
            ht = model.encode_values(pm_t.S, target.attributes, enc)
            _write_embedding_csv(os.path.join(tmp, "target_embeddings.csv"), ht)
            if args.source_edges and args.source_attrs:
                source = load_graph(args.source_edges, args.source_attrs)
                if source.attr_dim != enc.W1.shape[0]:
                    raise DataError("checkpoint/source attribute dimension mismatch")
                if source.n_nodes != shift.xi1.shape[0]:
                    raise DataError("checkpoint shifts sized for a different source graph")
                pm_s = reconstruct(source, cfg.walk_config("source"), cfg.use_neg)
                hs = model.encode_values(pm_s.S, source.attributes, enc, shift,
                                         cfg.shift_position)
                _write_embedding_csv(os.path.join(tmp, "source_embeddings.csv"), hs)
            _atomic_commit(tmp, dump_out)
            out["embeddings"] = dump_out
        except BaseException:
            shutil.rmtree(tmp, ignore_errors=True)
            raise

    text = json.dumps(out, indent=1, sort_keys=True)
    if args.out:
        with open(args.out + ".tmp", "w") as fh:
            fh.write(text + "\n")
        os.replace(args.out + ".tmp", args.out)
    print(text)
    return 0


def _write_embedding_csv(path, h):
    with open(path, "w") as fh:
        fh.write("node," + ",".join(f"e{k}" for k in range(h.shape[1])) + "\n")
        for i, row in enumerate(h):
            fh.write(str(i) + "," + ",".join(repr(float(v)) for v in row) + "\n")


def cmd_gradcheck(args):
    groups = args.group or None
    results = run_gradcheck(step=args.step, groups=groups, seed=args.fixture_seed)
    worst = 0.0
    for name, err in results.items():
        status = "ok" if err < args.tol else "FAIL"
        print(f"{name:<14s} max rel err {err:.3e}  [{status}]")
        worst = max(worst, err)
    if worst >= args.tol:
        raise NumericalError(f"gradient check failed: worst {worst:.3e} >= tol {args.tol:g}")
    return 0


# ---------------------------------------------------------------- entry point

def build_parser():
    p = _Parser(prog="graphshift",
                description="semi-supervised graph domain adaptation with reconstructed "
                            "structure, per-node source shifts, adversarial alignment and "
                            "posterior-weighted pseudo-labels")
    p.add_argument("--version", action="version", version=f"graphshift {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("synth", parents=[], help="generate a synthetic two-domain pair")
    ps.add_argument("--out", required=True)
    ps.add_argument("--nodes", type=int, default=300)
    ps.add_argument("--classes", type=int, default=3)
    ps.add_argument("--dim", type=int, default=16)
    ps.add_argument("--p-in", dest="p_in", type=float, default=0.1)
    ps.add_argument("--p-out", dest="p_out", type=float, default=0.01)
    ps.add_argument("--p-in-target", dest="p_in_target", type=float, default=None)
    ps.add_argument("--p-out-target", dest="p_out_target", type=float, default=None)
    ps.add_argument("--offset", type=float, default=0.0, help="target attribute mean shift")
    ps.add_argument("--cov-scale", dest="cov_scale", type=float, default=1.0)
    ps.add_argument("--noise-std", dest="noise_std", type=float, default=1.0)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--force", action="store_true")
    ps.set_defaults(func=cmd_synth)

    pp = sub.add_parser("ppmi", help="precompute a structure cache for one graph")
    pp.add_argument("--edges", required=True)
    pp.add_argument("--attrs", required=True)
    pp.add_argument("--out", required=True)
    pp.add_argument("--domain", choices=("source", "target"), default="source",
                    help="which walk stream of the planned train run to match")
    pp.add_argument("--backend", choices=("auto", "numba", "numpy"), default=None)
    pp.add_argument("--force", action="store_true")
    _add_config_flags(pp)
    pp.set_defaults(func=cmd_ppmi)

    pt = sub.add_parser("train", help="train on a source/target pair")
    pt.add_argument("--out", required=True)
    pt.add_argument("--data-dir", help="directory in the synth layout")
    pt.add_argument("--source-edges")
    pt.add_argument("--source-attrs")
    pt.add_argument("--source-labels")
    pt.add_argument("--target-edges")
    pt.add_argument("--target-attrs")
    pt.add_argument("--target-labels")
    pt.add_argument("--source-attr-names")
    pt.add_argument("--target-attr-names")
    pt.add_argument("--label-rate", type=float, default=None,
                    help="subsample the labeled source mask to this rate")
    pt.add_argument("--split-seed", type=int, default=None)
    pt.add_argument("--ppmi-source", help="structure cache for the source graph")
    pt.add_argument("--ppmi-target", help="structure cache for the target graph")
    pt.add_argument("--dump-pseudo", action="store_true",
                    help="per-epoch pseudo label/score/weight CSVs")
    pt.add_argument("--seeds", type=int, default=None,
                    help="run N seeds (seed, seed+1, ...) into per-seed subdirs")
    pt.add_argument("--jobs", type=int, default=1, help="parallel processes for --seeds")
    pt.add_argument("--force", action="store_true")
    _add_config_flags(pt)
    pt.set_defaults(func=cmd_train)

    pe = sub.add_parser("eval", help="score a checkpoint on a target graph")
    pe.add_argument("--checkpoint", required=True)
    pe.add_argument("--target-edges", required=True)
    pe.add_argument("--target-attrs", required=True)
    pe.add_argument("--target-labels")
    pe.add_argument("--source-edges")
    pe.add_argument("--source-attrs")
    pe.add_argument("--ppmi-target", help="structure cache for the target graph")
    pe.add_argument("--dump-embeddings", help="directory for embedding CSVs")
    pe.add_argument("--out", help="write the metrics JSON here")
    pe.add_argument("--force", action="store_true")
    pe.set_defaults(func=cmd_eval)

    pg = sub.add_parser("gradcheck", help="finite-difference check of every gradient group")
    pg.add_argument("--step", type=float, default=1e-5)
    pg.add_argument("--tol", type=float, default=1e-5)
    pg.add_argument("--fixture-seed", type=int, default=7)
    pg.add_argument("--group", action="append", choices=sorted(GROUPS),
                    help="restrict to one group (repeatable)")
    pg.set_defaults(func=cmd_gradcheck)
    return p


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return args.func(args) or 0
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except (DataError, OSError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
