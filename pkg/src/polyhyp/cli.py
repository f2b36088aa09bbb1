"""Command line driver: `polyhyp <module> <action> ...` and `polyhyp run --config`."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys

from . import coneoff as co
from . import gp, hyp, lamp
from . import median as md
from .graphcore import FiniteGraph, builtin_patterns, find_induced, get_pattern, graph_to_dict, read_graph

CONFIG_VERSION = 1


class CliError(Exception):
    pass


def config_hash(params):
    blob = json.dumps(params, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _header(params):
    return f"# polyhyp {params.get('kind', '?')} config={config_hash(params)} seed={params.get('seed', 0)}\n"


def _csv(params, header, rows):
    buf = io.StringIO()
    buf.write(_header(params))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _vertex(g, v):
    """A vertex given by id or by label."""
    try:
        i = int(v)
        g.check(i)
        return i
    except ValueError:
        pass
    for i, p in enumerate(g.payloads):
        lab = p.get("label") if isinstance(p, dict) else p
        if lab == v:
            return i
    raise CliError(f"no vertex {v!r}")


def _spec(params):
    if "spec" not in params:
        raise CliError("missing --spec")
    spec = gp.read_spec(params["spec"])
    if params.get("window") is not None:
        spec = spec.with_window(int(params["window"]))
    return spec


def _word_graph(spec, g):
    labels = {k: spec.names[u] for k, u in g.edge_labels.items()}
    return FiniteGraph(g.n, g.edges, [gp.format_word(spec, w) for w in g.payloads], labels, dict(g.meta))


# ------------------------------------------------------------- experiments


def exp_ball(p):
    spec = _spec(p)
    g = gp.ball(spec, int(p["R"]), p.get("metric", "qm"), strict=not p.get("lenient", False))
    d = graph_to_dict(_word_graph(spec, g), labels=[None] * g.n)
    d["config"] = config_hash(p)
    return json.dumps(d, indent=1) + "\n"


def exp_pattern(p):
    spec = _spec(p)
    lines = [_header(p).rstrip()]
    if p.get("pattern"):
        pat = get_pattern(p["pattern"])
        hit = find_induced(spec.gamma, spec.cards, pat)
        names = [spec.names[i] for i in hit] if hit is not None else None
        lines.append(f"pattern {pat.name}: {'found ' + ' '.join(names) if names else 'absent'}")
    else:
        lines.append(f"contains F2: {str(gp.contains_F2(spec)).lower()}")
        lines.append(f"contains F2xF2: {str(gp.contains_F2xF2(spec)).lower()}")
        wit = gp.f2xf2_witness(spec)
        if wit is not None:
            name, verts = wit
            lines.append(f"witness {name}: {' '.join(verts)}")
    return "\n".join(lines) + "\n"


def exp_normalize(p):
    spec = _spec(p)
    w = gp.normalize(spec, p["word"])
    return f"{gp.format_word(spec, w)}\nsyllable length {len(w)}\n"


def exp_hyperplanes(p):
    g = read_graph(p["graph"])
    dec = md.hyperplanes(g, p.get("mode", "median"))
    rows = [(u, v, c, int(dec.interior[c])) for (u, v), c in sorted(dec.edge_class.items())]
    return _csv(p, ["u", "v", "class", "interior"], rows)


def exp_triangle(p):
    g = read_graph(p["graph"])
    xs = [_vertex(g, p[k]) for k in ("x", "y", "z")]
    ys = md.median_triangle(g, *xs)
    return _csv(p, ["x", "y"], list(zip(xs, ys)))


def _collection(spec, g, which):
    if which in ("polynomial", "maximal"):
        mem = gp.parabolic_collection(spec, g, maximal=(which == "maximal"))
    elif which == "vertex":
        mem = gp.parabolic_collection(spec, g, lams=[(u,) for u in spec.names])
    else:
        lams = [tuple(t.split("+")) for t in which.split(",")]
        mem = gp.parabolic_collection(spec, g, lams=lams)
    return co.Collection(g, [m for _, m in mem], on_disconnected="split")


def exp_profile(p):
    spec = _spec(p)
    g = gp.ball(spec, int(p["R"]), p.get("metric", "cayley"), strict=not p.get("lenient", False))
    kind = p.get("map", "canonical")
    if kind == "canonical":
        phi = co.VertexMap.canonical(g, _collection(spec, g, p.get("collection", "polynomial")))
    elif kind == "identity":
        phi = co.VertexMap.identity(g)
    elif kind == "constant":
        phi = co.VertexMap.constant(g)
    else:
        raise CliError(f"unknown map {kind!r}")
    sampling = p.get("sampling", "exhaustive")
    if str(sampling).isdigit():
        import numpy as np
        cands = co.default_centers(phi, int(p["R1"]))
        rng = np.random.default_rng(int(p.get("seed", 0)))
        sampling = sorted(rng.choice(cands, size=min(int(sampling), len(cands)), replace=False).tolist())
    prof = co.gentleness_profile(phi, int(p["R1"]), int(p["R2"]), sampling, threads=int(p.get("threads", 1)))
    out = _csv(p, ["R1", "R2", "G", "eta_hat"], [(a, b, c, f"{e:.6g}") for a, b, c, e in prof.rows()])
    for fam in p.get("fit", []) or []:
        f = co.fit_constant(prof, fam)
        out += f"# fit {fam}: " + ("infinite" if f.infinite else f"C={f.C}") + "\n"
    return out


def exp_delta(p):
    g = read_graph(p["graph"])
    sample = p.get("sample") or "auto"
    r = hyp.four_point_delta(g, sample=sample, seed=int(p.get("seed", 0)))
    w = list(r.witness) + [""] * (4 - len(r.witness))
    return _csv(p, ["delta", "w", "x", "y", "z", "quadruples", "sampled", "sample_size"],
                [[r.delta, *w, r.quadruples, int(r.sampled), r.sample_size]])


def exp_detour(p):
    g = read_graph(p["graph"])
    x, y, c = (_vertex(g, p[k]) for k in ("x", "y", "center"))
    L = hyp.detour_length(g, x, y, c, int(p["s"]))
    d = g.dist_from(x)[y]
    num = lambda t: t if t == float("inf") else int(t)
    return _csv(p, ["x", "y", "center", "s", "d", "detour"], [[x, y, c, p["s"], num(d), num(L)]])


def parse_lamps(text):
    """'0..13' or '0,2,5' or a mix like '0..3,7'."""
    out = set()
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            a, b = part.split("..")
            out.update(range(int(a), int(b) + 1))
        else:
            out.add(int(part))
    return out


def exp_witness(p):
    S = parse_lamps(p.get("lamps", ""))
    fam = lamp.path_family(S, int(p["p"]), int(p["R"]))
    ok, why = lamp.verify_exp_connected(fam.x, fam.y, 2 ** 0.25, 6, fam.R, fam)
    return _header(p) + f"# verified: {str(ok).lower()} ({why})\n" + lamp.format_family(fam)


def exp_suite(p):
    from . import acceptance
    only = p.get("only")
    checks = acceptance.run_all(set(only) if only else None)
    p["_failed"] = sum(not c.ok for c in checks)
    return "\n".join(c.line() for c in checks) + "\n"


KINDS = {
    "ball": exp_ball, "pattern": exp_pattern, "normalize": exp_normalize,
    "hyperplanes": exp_hyperplanes, "triangle": exp_triangle, "profile": exp_profile,
    "delta": exp_delta, "detour": exp_detour, "witness": exp_witness, "suite": exp_suite,
}

EXTENSIONS = {"ball": ".json", "witness": ".txt", "pattern": ".txt", "normalize": ".txt", "suite": ".txt"}


def run_config(cfg, out_dir=None):
    """Run every experiment in a config; returns the list of written paths."""
    if cfg.get("version") != CONFIG_VERSION:
        raise CliError(f"config version must be {CONFIG_VERSION}")
    seed = cfg.get("seed", 0)
    out_dir = out_dir or cfg.get("out", ".")
    exps = cfg.get("experiments", [])
    names = [e.get("name") for e in exps]
    if None in names or len(set(names)) != len(names):
        raise CliError("every experiment needs a unique name")
    if exps:
        os.makedirs(out_dir, exist_ok=True)
    written = []
    for e in exps:
        params = {"seed": seed, **e}
        kind = params.get("kind")
        if kind not in KINDS:
            raise CliError(f"experiment {params['name']}: unknown kind {kind!r}")
        text = KINDS[kind](params)
        path = os.path.join(out_dir, params["name"] + EXTENSIONS.get(kind, ".csv"))
        with open(path, "w") as f:
            f.write(text)
        written.append(path)
    return written


# ------------------------------------------------------------------ parser


def build_parser():
    ap = argparse.ArgumentParser(prog="polyhyp", description="Polynomial hyperbolicity experiments.")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", help="output file (directory for `run`)")
    sub = ap.add_subparsers(dest="module", required=True)
    # the global flags are also accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out", default=argparse.SUPPRESS)

    def action(parent, name, kind, help):
        p = parent.add_parser(name, help=help, parents=[common])
        p.set_defaults(kind=kind)
        return p

    g = sub.add_parser("gp", help="graph products").add_subparsers(dest="action", required=True)
    p = action(g, "ball", "ball", "write a ball as a graph file")
    p.add_argument("--spec", required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--metric", choices=["qm", "cayley"], default="qm")
    p.add_argument("--window", type=int)
    p.add_argument("--lenient", action="store_true", help="allow windows below R (cyclic truncation)")
    p = action(g, "pattern", "pattern", "graphical criteria on the presentation graph")
    p.add_argument("--spec", required=True)
    p.add_argument("--pattern", choices=[q.name for q in builtin_patterns()])
    p = action(g, "normalize", "normalize", "normal form of a word")
    p.add_argument("--spec", required=True)
    p.add_argument("--word", required=True)

    m = sub.add_parser("median", help="hyperplanes and median triangles").add_subparsers(dest="action", required=True)
    p = action(m, "hyperplanes", "hyperplanes", "edge classes as CSV")
    p.add_argument("--graph", required=True)
    p.add_argument("--mode", choices=md.MODES, default="median")
    p = action(m, "triangle", "triangle", "median triangle of three vertices")
    p.add_argument("--graph", required=True)
    for k in ("x", "y", "z"):
        p.add_argument(f"--{k}", required=True)

    c = sub.add_parser("coneoff", help="cone-offs and gentleness").add_subparsers(dest="action", required=True)
    p = action(c, "profile", "profile", "gentleness profile table")
    p.add_argument("--spec", required=True)
    p.add_argument("--R", type=int, required=True)
    p.add_argument("--R1", type=int, required=True)
    p.add_argument("--R2", type=int, required=True)
    p.add_argument("--metric", choices=["qm", "cayley"], default="cayley")
    p.add_argument("--window", type=int)
    p.add_argument("--lenient", action="store_true")
    p.add_argument("--map", choices=["canonical", "identity", "constant"], default="canonical")
    p.add_argument("--collection", default="polynomial",
                   help="polynomial, maximal, vertex, or Λ list like 'a,b+c'")
    p.add_argument("--sampling", default="exhaustive", help="exhaustive, center, or a sample size")
    p.add_argument("--fit", nargs="*", default=[], help="families to fit: pol:k, lin, exp")

    h = sub.add_parser("hyp", help="hyperbolicity measurements").add_subparsers(dest="action", required=True)
    p = action(h, "delta", "delta", "four-point delta")
    p.add_argument("--graph", required=True)
    p.add_argument("--sample", type=int)
    p = action(h, "detour", "detour", "shortest path avoiding a ball")
    p.add_argument("--graph", required=True)
    for k in ("x", "y", "center"):
        p.add_argument(f"--{k}", required=True)
    p.add_argument("--s", type=int, required=True)

    lm = sub.add_parser("lamp", help="lamplighter witnesses").add_subparsers(dest="action", required=True)
    p = action(lm, "witness", "witness", "path family from (∅,0) to (S,p)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--lamps", default="", help="e.g. 0..13 or 0,2,5")
    p.add_argument("--R", type=int, required=True)

    p = sub.add_parser("suite", help="run the acceptance criteria", parents=[common])
    p.set_defaults(kind="suite")
    p.add_argument("--only", type=int, nargs="*")

    p = sub.add_parser("run", help="run a config file of experiments", parents=[common])
    p.set_defaults(kind="run")
    p.add_argument("--config", required=True)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    params = {k: v for k, v in vars(args).items() if v is not None and k not in ("module", "action", "out")}
    try:
        if args.kind == "run":
            with open(args.config) as f:
                cfg = json.load(f)
            if args.seed and "seed" not in cfg:
                cfg["seed"] = args.seed
            for path in run_config(cfg, args.out):
                print(path)
            return 0
        text = KINDS[args.kind](params)
    except (CliError, ValueError, KeyError, OSError, RuntimeError) as e:
        print(f"polyhyp: error: {e}", file=sys.stderr)
        return 2
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 1 if params.get("_failed") else 0


if __name__ == "__main__":
    sys.exit(main())
