"""Command-line front end.

Realizations are JSON documents::

    {"label": "plant", "n_x": 2, "n_u": 1, "n_y": 1,
     "A": [[0, 1], [-2, -3]], "B": [[0], [1]], "C": [[1, 0]], "D": [[0]]}

Arrays are row-major nested lists. ``B`` and ``D`` may be omitted when only
``T`` is wanted. Exit codes:

    0 success              2 parse or shape error
    3 not observable       4 kernel dimension mismatch
    5 rank deficient / residual too large
    6 singular transform   7 Markov parameters differ
"""

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SSEquivError
from .matcore import Tolerances, as_matrix
from .realization import Realization, is_observable, markov_deltas
from .simtransform import SimilarityTransform, find_similarity, transform_realization

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOT_OBSERVABLE = 3
EXIT_MARKOV_MISMATCH = 7


class DocumentError(SSEquivError):
    code = EXIT_PARSE


@dataclass(eq=False)
class RealizationDocument:
    A: np.ndarray
    C: np.ndarray
    B: Optional[np.ndarray] = None
    D: Optional[np.ndarray] = None
    label: Optional[str] = None

    @property
    def n_x(self):
        return self.A.shape[0]

    @property
    def has_io(self):
        return self.B is not None and self.D is not None

    def to_realization(self):
        if not self.has_io:
            raise DocumentError("document has no B/D matrices")
        return Realization(self.A, self.B, self.C, self.D)

    @classmethod
    def from_realization(cls, r, label=None):
        return cls(r.A, r.C, r.B, r.D, label)

    def to_dict(self):
        out = {}
        if self.label is not None:
            out["label"] = self.label
        out["n_x"] = self.n_x
        if self.has_io:
            out["n_u"] = int(self.B.shape[1])
        out["n_y"] = int(self.C.shape[0])
        for name in "ABCD":
            m = getattr(self, name)
            if m is not None:
                out[name] = m.tolist()
        return out


def _reject_constant(token):
    raise ValueError(f"non-finite number {token!r} is not allowed")


def loads(text):
    """Parse JSON, rejecting NaN/Infinity tokens."""
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except ValueError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc


def _matrix_field(doc, name, shape):
    value = doc[name]
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise DocumentError(f"{name} must be a nested row-major array")
    if any(not isinstance(x, (int, float)) or isinstance(x, bool) for row in value for x in row):
        raise DocumentError(f"{name} entries must be numbers")
    if len(value) != shape[0] or any(len(row) != shape[1] for row in value):
        raise DocumentError(f"{name} does not have the declared shape {shape}")
    try:
        return as_matrix(value, name)
    except SSEquivError as exc:
        raise DocumentError(str(exc)) from exc


def _count(doc, key):
    value = doc.get(key)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise DocumentError(f"{key} must be a positive integer")
    return value


def parse_document(text):
    doc = loads(text)
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    for key in ("A", "C"):
        if key not in doc:
            raise DocumentError(f"missing required field {key!r}")
    n_x, n_y = _count(doc, "n_x"), _count(doc, "n_y")
    A = _matrix_field(doc, "A", (n_x, n_x))
    C = _matrix_field(doc, "C", (n_y, n_x))
    B = D = None
    if ("B" in doc) != ("D" in doc):
        raise DocumentError("B and D must be given together")
    if "B" in doc:
        n_u = _count(doc, "n_u")
        B = _matrix_field(doc, "B", (n_x, n_u))
        D = _matrix_field(doc, "D", (n_y, n_u))
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise DocumentError("label must be a string")
    return RealizationDocument(A, C, B, D, label)


def dumps(doc):
    # json emits floats with repr(), the shortest round-trip representation.
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def transform_to_dict(t: SimilarityTransform):
    return {
        "n_x": t.n_x,
        "T": t.T.tolist(),
        "T_inv": t.T_inv.tolist(),
        "alpha": t.alpha.tolist(),
        "residual_state": t.residual_state,
        "residual_output": t.residual_output,
        "condition_estimate": t.condition_estimate,
    }


def parse_transform(text):
    doc = loads(text)
    if not isinstance(doc, dict) or "T" not in doc:
        raise DocumentError("transform document must be an object with a 'T' field")
    T = doc["T"]
    n = len(T) if isinstance(T, list) else 0
    if n == 0:
        raise DocumentError("T must be a nonempty nested array")
    return _matrix_field(doc, "T", (n, n))


def _read(path):
    try:
        with open(path) as f:
            return f.read()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from exc


def _write(out, text):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as f:
            f.write(text)


def _tolerances(args):
    defaults = Tolerances()
    tol = defaults.residual_tol if args.tol is None else args.tol
    try:
        return Tolerances(rank_tol=args.rank_tol, residual_tol=tol)
    except ValueError as exc:
        raise DocumentError(str(exc)) from exc


def _load_pair(args):
    doc0 = parse_document(_read(args.system0))
    doc = parse_document(_read(args.system))
    if doc0.A.shape != doc.A.shape or doc0.C.shape != doc.C.shape:
        raise DocumentError(
            f"dimension mismatch: n_x/n_y {doc0.n_x}/{doc0.C.shape[0]} vs {doc.n_x}/{doc.C.shape[0]}"
        )
    return doc0, doc


def cmd_find_transform(args):
    tol = _tolerances(args)
    doc0, doc = _load_pair(args)
    t = find_similarity(doc0.A, doc0.C, doc.A, doc.C, tol)
    result = transform_to_dict(t)
    if doc.has_io:
        aligned = transform_realization(doc.to_realization(), t)
        result["transformed"] = RealizationDocument.from_realization(aligned, doc.label).to_dict()
    _write(args.output, dumps(result))
    return EXIT_OK


def cmd_transform(args):
    doc = parse_document(_read(args.system))
    T = parse_transform(_read(args.transform))
    if T.shape[0] != doc.n_x:
        raise DocumentError(f"T is {T.shape[0]}x{T.shape[0]}, system has n_x = {doc.n_x}")
    t = SimilarityTransform.from_matrix(T)
    if doc.has_io:
        out = RealizationDocument.from_realization(
            transform_realization(doc.to_realization(), t), doc.label
        )
    else:
        out = RealizationDocument(t.T_inv @ doc.A @ t.T, doc.C @ t.T, label=doc.label)
    _write(args.output, dumps(out.to_dict()))
    return EXIT_OK


def cmd_verify(args):
    tol = _tolerances(args)
    doc0, doc = _load_pair(args)
    r0, r = doc0.to_realization(), doc.to_realization()
    if (r0.n_u, r0.n_y) != (r.n_u, r.n_y):
        raise DocumentError("input/output sizes differ between the two systems")
    t = find_similarity(doc0.A, doc0.C, doc.A, doc.C, tol)
    k = args.markov_count if args.markov_count is not None else 2 * doc.n_x
    if k < 1:
        raise DocumentError("--markov-count must be >= 1")
    deltas, scale = markov_deltas(r0, r, k)
    bound = tol.residual_tol * (scale if scale > tol.residual_tol else 1.0)
    ok = all(d <= bound for d in deltas)
    lines = [
        f"residual_state={t.residual_state:.6e}",
        f"residual_output={t.residual_output:.6e}",
        f"markov_scale={scale:.6e}",
        *(f"markov_delta[{i}]={d:.6e}" for i, d in enumerate(deltas)),
        f"markov_equivalent={'true' if ok else 'false'}",
    ]
    _write(args.output, "\n".join(lines) + "\n")
    if not ok:
        worst = max(range(len(deltas)), key=deltas.__getitem__)
        print(
            f"error=MarkovMismatch index={worst} delta={deltas[worst]:.6g} bound={bound:.6g}",
            file=sys.stderr,
        )
        return EXIT_MARKOV_MISMATCH
    return EXIT_OK


def cmd_check_observability(args):
    tol = _tolerances(args)
    doc = parse_document(_read(args.system))
    report = is_observable(doc.A, doc.C, tol)
    verdict = "observable" if report.observable else "not-observable"
    _write(args.output, f"rank={report.rank} n_x={doc.n_x} verdict={verdict}\n")
    return EXIT_OK if report.observable else EXIT_NOT_OBSERVABLE


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ssequiv",
        description="Similarity transformations between observable state-space realizations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def tol_flags(p):
        p.add_argument("--tol", type=float, default=None,
                       help="relative residual tolerance (default 1e-8)")
        p.add_argument("--rank-tol", type=float, default=None,
                       help="absolute singular-value cutoff (default: scaled machine epsilon)")

    p = sub.add_parser("find-transform", help="recover T with A0 = T^-1 A T, C0 = C T")
    p.add_argument("system0")
    p.add_argument("system")
    p.add_argument("-o", "--output")
    tol_flags(p)
    p.set_defaults(func=cmd_find_transform)

    p = sub.add_parser("transform", help="apply T from a transform document to a realization")
    p.add_argument("system")
    p.add_argument("transform")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("verify", help="recover T and compare Markov parameters")
    p.add_argument("system0")
    p.add_argument("system")
    p.add_argument("-o", "--output")
    p.add_argument("--markov-count", type=int, default=None,
                   help="number of Markov parameters to compare (default 2*n_x)")
    tol_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check-observability", help="Kalman rank test on (A, C)")
    p.add_argument("system")
    p.add_argument("-o", "--output")
    tol_flags(p)
    p.set_defaults(func=cmd_check_observability)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches EXIT_PARSE.
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SSEquivError as exc:
        print(exc.diagnostic(), file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
