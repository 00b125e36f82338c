"""Command-line interface: ``clustercompare <command> ...``.

Exit codes: 0 success, 1 failed oracle check, 2 bad input or parameters,
3 clusterings over different element sets, 4 undefined adjustment.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import mutual_info as mi
from . import oracle, rand
from .core import Clustering, to_base
from .errors import DomainError, ElementMismatchError, UndefinedAdjustmentError
from .fixtures import FIXTURES
from .random_models import (
    all_labels,
    make_rng,
    num_labels,
    pa_randomize,
    perm_labels,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_MISMATCH, EXIT_UNDEFINED = 0, 1, 2, 3, 4
NORM_FLAGS = {"min": "min", "sqrt": "sqrt", "sum": "sum", "max": "max",
              "maxlogk": "max_logk", "logn": "log_n"}


class InputError(Exception):
    """Malformed input file or inconsistent command-line parameters."""


# -- clustering files ------------------------------------------------------

def parse_clustering(text: str, source: str = "<input>") -> Clustering:
    """Parse ``element<TAB>label`` lines; ``#`` starts a comment."""
    labels: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip("\r\n")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0].strip() or not fields[1].strip():
            raise InputError(f"{source}:{lineno}: expected 'element<TAB>label', got {raw!r}")
        element, label = fields[0].strip(), fields[1].strip()
        if element in labels:
            raise InputError(f"{source}:{lineno}: element {element!r} listed twice")
        labels[element] = label
    if not labels:
        raise InputError(f"{source}: no clustering records found")
    return Clustering.from_labels(labels)


def read_clustering(path: str) -> Clustering:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: cannot read clustering file ({exc})") from None
    return parse_clustering(text, path)


def format_clustering(c: Clustering) -> str:
    return "".join(f"{e}\t{label}\n" for e, label in zip(c.elements, c.labels))


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


# -- scoring ---------------------------------------------------------------

@dataclass
class ComparisonResult:
    measure: str
    model: str
    sided: str
    normalizer: str | None
    raw: float
    expectation: float
    max_bound: float
    adjusted: float
    n_elements: int
    k_a: int
    k_b: int


def compare(a: Clustering, b: Clustering, measure: str = "rand", model: str = "perm",
            one_sided: bool = False, reference_side: str | None = None,
            norm: str | None = None, log_base: str = "e",
            approx: bool = False) -> ComparisonResult:
    """Score ``a`` against ``b`` exactly as the ``compare`` command does."""
    if one_sided and reference_side not in ("a", "b"):
        raise InputError("--one-sided needs --reference-side a or b")
    if one_sided and model == "none":
        raise InputError("--one-sided has no meaning without a random model")
    sided = "one" if one_sided else "two"
    reference = (a if reference_side == "a" else b) if one_sided else None
    if measure == "rand":
        if norm is not None:
            raise InputError("--norm applies to --measure mi only")
        raw = rand.rand_index(a, b)
        if model == "none":
            expectation = 0.0
        else:
            if approx and model == "perm":
                raise InputError("--approx is available for the num and all models only")
            spec = rand.RandModelSpec(model, "one_sided" if one_sided else "two_sided",
                                      reference, approx)
            expectation = rand.expected_rand(a, b, spec)
        adjusted = rand.adjust_for_chance(raw, expectation, 1.0)
        return ComparisonResult("rand", model, sided, None, raw, expectation, 1.0, adjusted,
                                a.n_elements, a.n_clusters, b.n_clusters)
    if approx:
        raise InputError("--approx applies to --measure rand only")
    spec = mi.MiModelSpec(model, "one_sided" if one_sided else "two_sided",
                          NORM_FLAGS[norm] if norm else None, reference)
    raw = mi.mutual_information(a, b)
    bound = mi.max_bound_for(a, b, spec)
    expectation = mi.expected_mi(a, b, spec)
    adjusted = rand.adjust_for_chance(raw, expectation, bound)
    return ComparisonResult(
        "mi", model, sided, spec.normalizer,
        to_base(raw, log_base), to_base(expectation, log_base), to_base(bound, log_base),
        adjusted, a.n_elements, a.n_clusters, b.n_clusters,
    )


def _sizes(text: str | None, flag: str) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"{flag} expects comma-separated integers, got {text!r}") from None


def _need(value, flag: str, model: str):
    if value is None:
        raise InputError(f"model {model} needs {flag}")
    return value


def expectation_record(args) -> dict:
    measure, model, approx = args.measure, args.model, args.approx
    ref = read_clustering(args.reference) if args.reference else None
    sided = "one" if ref is not None else "two"
    if approx and (measure != "rand" or model == "perm"):
        raise InputError("--approx is available for rand under the num and all models only")
    rec = {"measure": measure, "model": model, "sided": sided,
           "evaluation": "asymptotic" if approx else "exact"}
    n = args.n if args.n is not None else (ref.n_elements if ref is not None else None)
    if model == "perm":
        sa = _need(_sizes(args.sizes_a, "--sizes-a"), "--sizes-a", model)
        sb = ref.sizes if ref is not None else _need(_sizes(args.sizes_b, "--sizes-b"), "--sizes-b", model)
        value = rand.expected_rand_perm(sa, sb, n) if measure == "rand" else mi.expected_mi_perm(sa, sb, n)
        rec.update(sizes_a=list(sa), sizes_b=list(sb), n=sum(sa))
    elif model == "num":
        ka = _need(args.ka, "--ka", model)
        if ref is not None:
            if measure == "rand":
                value = rand.expected_rand_num_onesided(ka, n, ref, approx=approx)
            else:
                value = mi.expected_mi_num_onesided(ka, n, ref)
            rec.update(ka=ka, n=n)
        else:
            kb = _need(args.kb, "--kb", model)
            if measure == "rand":
                value = rand.expected_rand_num(ka, kb, n, approx=approx)
            else:
                value = mi.expected_mi_num(ka, kb, _need(n, "--n", model))
            rec.update(ka=ka, kb=kb, n=n)
    elif model == "all":
        n = _need(n, "--n", model)
        if ref is not None:
            if measure == "rand":
                value = rand.expected_rand_all_onesided(n, ref, approx=approx)
            else:
                value = mi.expected_mi_all_onesided(n, ref)
        elif measure == "rand":
            value = rand.expected_rand_all(n, approx=approx)
        else:
            value = mi.expected_mi_all(n)
        rec.update(n=n)
    else:
        raise InputError(f"unknown model {model!r}")
    if measure == "mi":
        value = to_base(value, args.log_base)
        rec["log_base"] = args.log_base
    rec["expectation"] = float(value)
    return rec


# -- commands --------------------------------------------------------------

def cmd_compare(args) -> int:
    a, b = read_clustering(args.file_a), read_clustering(args.file_b)
    result = compare(a, b, args.measure, args.model, args.one_sided, args.reference_side,
                     args.norm, args.log_base, args.approx)
    print(_dump(asdict(result)))
    return EXIT_OK


def cmd_expect(args) -> int:
    print(_dump(expectation_record(args)))
    return EXIT_OK


def rank_pairs(named: list[tuple[str, Clustering]], measure: str, model: str,
               norm: str | None = None, log_base: str = "e") -> list[dict]:
    rows = []
    for (na, a), (nb, b) in itertools.combinations(named, 2):
        r = compare(a, b, measure, model, norm=norm, log_base=log_base)
        rows.append({"a": na, "b": nb, "raw": r.raw, "adjusted": r.adjusted})
    rows.sort(key=lambda row: (-row["adjusted"], row["a"], row["b"]))
    for i, row in enumerate(rows, start=1):
        row["rank"] = i
    return rows


def _tsv(rows: list[dict], columns: list[str]) -> str:
    def fmt(v):
        return f"{v:.6f}" if isinstance(v, float) else str(v)
    lines = ["\t".join(columns)]
    lines += ["\t".join(fmt(row[c]) for c in columns) for row in rows]
    return "\n".join(lines) + "\n"


def cmd_rank(args) -> int:
    if len(args.files) < 2:
        raise InputError("rank needs at least two clustering files")
    named = [(f, read_clustering(f)) for f in args.files]
    rows = rank_pairs(named, args.measure, args.model, args.norm, args.log_base)
    if args.format == "json":
        print(_dump({"measure": args.measure, "model": args.model, "pairs": rows}))
    else:
        sys.stdout.write(_tsv(rows, ["rank", "a", "b", "raw", "adjusted"]))
    return EXIT_OK


def _sample_one(args, rng, template: Clustering | None) -> Clustering:
    if args.model == "perm":
        labels = perm_labels(np.asarray(template.labels), rng)
        return Clustering(template.elements, tuple(int(x) for x in labels))
    if args.model == "num":
        labels = num_labels(_need(args.n, "--n", "num"), _need(args.k, "--k", "num"), rng)
    else:
        labels = all_labels(_need(args.n, "--n", "all"), rng)
    return Clustering.from_label_sequence(labels.tolist())


def cmd_sample(args) -> int:
    if args.count < 1:
        raise InputError("--count must be at least 1")
    template = None
    if args.model == "perm":
        template = read_clustering(_need(args.template, "--template", "perm"))
    outputs = []
    for i in range(args.count):
        c = _sample_one(args, make_rng(args.seed, i), template)
        outputs.append(format_clustering(c))
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, text in enumerate(outputs):
            (out / f"sample_{i:04d}.tsv").write_text(text, encoding="utf-8")
    else:
        for i, text in enumerate(outputs):
            sys.stdout.write(f"# sample {i} model={args.model} seed={args.seed} stream={i}\n{text}")
    return EXIT_OK


def balanced(n: int, k: int) -> Clustering:
    base, extra = divmod(n, k)
    return Clustering.from_sizes([base + (i < extra) for i in range(k)])


def cmd_pref_attach(args) -> int:
    if args.k < 2 or args.n < args.k:
        raise InputError("pref-attach needs 2 <= k <= n")
    points = pa_randomize(balanced(args.n, args.k), args.steps, make_rng(args.seed),
                          args.record_every)
    rows = [{"step": p.step, "entropy_bits": p.size_entropy_bits,
             "ari_perm": p.ari_perm, "ari_num": p.ari_num} for p in points]
    sys.stdout.write(_tsv(rows, ["step", "entropy_bits", "ari_perm", "ari_num"]))
    return EXIT_OK


def cmd_ranking_experiment(args) -> int:
    named = list(FIXTURES.items())
    models = ["none", "perm", "num", "all"]
    out = []
    for model in models:
        for row in rank_pairs(named, args.measure, model, args.norm):
            out.append({"model": model, **row, "pair": row["a"] + row["b"]})
    sys.stdout.write(_tsv(out, ["model", "rank", "pair", "raw", "adjusted"]))
    return EXIT_OK


def cmd_oracle(args) -> int:
    overrides = {}
    if args.inject_fault:
        name = args.inject_fault
        if name not in oracle.DEFAULT_FORMULAS:
            raise InputError(f"unknown formula {name!r}")
        good = oracle.DEFAULT_FORMULAS[name]
        overrides[name] = lambda *a, **kw: float(good(*a, **kw)) * (1 + 1e-6) + 1e-6
    checks = oracle.verify_formulas(args.max_n, overrides)
    print("formula\tcases\tmax_rel_error\ttolerance\tstatus")
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{c.name}\t{c.cases}\t{c.max_rel_error:.3e}\t{c.tolerance:.0e}\t{status}")
    failed = [c.name for c in checks if not c.passed]
    print(f"# {len(checks) - len(failed)}/{len(checks)} formulas agree with enumeration up to N={args.max_n}")
    return EXIT_FAIL if failed else EXIT_OK


# -- parser ----------------------------------------------------------------

def _add_scoring(p: argparse.ArgumentParser) -> None:
    p.add_argument("--measure", choices=("rand", "mi"), default="rand")
    p.add_argument("--model", choices=("none", "perm", "num", "all"), default="perm")
    p.add_argument("--norm", choices=tuple(NORM_FLAGS), default=None,
                   help="MI maximum bound (default: sum for none/perm, max for num, logn for all)")
    p.add_argument("--log-base", choices=("e", "2", "10"), default="e",
                   help="logarithm base for MI-family outputs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clustercompare",
        description="Compare clusterings with Rand index and mutual information "
                    "adjusted under a chosen random clustering model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", help="score two clustering files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    _add_scoring(p)
    p.add_argument("--one-sided", action="store_true", help="hold one clustering fixed")
    p.add_argument("--reference-side", choices=("a", "b"))
    p.add_argument("--approx", action="store_true", help="asymptotic Rand expectation")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("expect", help="expected Rand index or MI under a random model")
    p.add_argument("--measure", choices=("rand", "mi"), default="rand")
    p.add_argument("--model", choices=("perm", "num", "all"), required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--ka", type=int)
    p.add_argument("--kb", type=int)
    p.add_argument("--sizes-a", help="comma-separated cluster sizes (perm)")
    p.add_argument("--sizes-b", help="comma-separated cluster sizes (perm)")
    p.add_argument("--reference", help="clustering file held fixed (one-sided)")
    p.add_argument("--approx", action="store_true")
    p.add_argument("--log-base", choices=("e", "2", "10"), default="e")
    p.set_defaults(func=cmd_expect)

    p = sub.add_parser("rank", help="rank all pairs of clustering files by similarity")
    p.add_argument("files", nargs="+")
    _add_scoring(p)
    p.add_argument("--format", choices=("json", "tsv"), default="tsv")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("sample", help="draw clusterings from a random model")
    p.add_argument("--model", choices=("perm", "num", "all"), required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--template", help="clustering file whose sizes are kept (perm)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out-dir", help="write sample_NNNN.tsv files here instead of stdout")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("experiment", help="synthetic experiments")
    exp = p.add_subparsers(dest="experiment", required=True)
    q = exp.add_parser("pref-attach", help="preferential-attachment drift trajectory (TSV)")
    q.add_argument("--n", type=int, default=200)
    q.add_argument("--k", type=int, default=10)
    q.add_argument("--steps", type=int, default=100_000)
    q.add_argument("--record-every", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=cmd_pref_attach)
    q = exp.add_parser("ranking", help="pair rankings of the W/X/Y/Z fixtures per model (TSV)")
    q.add_argument("--measure", choices=("rand", "mi"), default="rand")
    q.add_argument("--norm", choices=tuple(NORM_FLAGS), default=None)
    q.set_defaults(func=cmd_ranking_experiment)

    p = sub.add_parser("oracle", help="check closed forms against exhaustive enumeration")
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--inject-fault", metavar="FORMULA", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ElementMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except UndefinedAdjustmentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except (InputError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
