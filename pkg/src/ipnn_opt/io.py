"""Plain-text file formats.

Matrix file::

    ipnn-matrix 1
    <rows> <cols>
    <re> <im> <re> <im> ...        one line per matrix row

Values are written with 17 significant digits so doubles round-trip
exactly. Blank lines and ``#`` comments are ignored; anything after the
last row is an error.

Network and dataset files are JSON documents with ``format`` and
``version`` keys. Mesh MZIs are listed column-major (ascending mesh column,
then ascending top row), each as ``[column, row, theta, phi]``.

Results tables are CSV with a header; the column set is fixed per family.
"""
import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import InvalidInputError, ParseError
from .mesh import MeshDecomposition, MziPhase
from .network import Dataset, Ipnn
from .numerics import as_matrix
from .reflect import LayerFactorization, Reflector, factorize, from_meshes

MATRIX_MAGIC = "ipnn-matrix"
MATRIX_VERSION = 1
NETWORK_FORMAT = "ipnn-network"
DATASET_FORMAT = "ipnn-dataset"
JSON_VERSION = 1


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_matrix(path, m) -> None:
    a = as_matrix(m)
    lines = [f"{MATRIX_MAGIC} {MATRIX_VERSION}", f"{a.shape[0]} {a.shape[1]}"]
    for row in a:
        lines.append(" ".join(f"{_fmt(z.real)} {_fmt(z.imag)}" for z in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _content_lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _float(tok: str, no: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"non-numeric value {tok!r}", no) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {tok!r}", no)
    return v


def parse_matrix(text: str) -> np.ndarray:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty matrix file")
    no, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or parts[0] != MATRIX_MAGIC:
        raise ParseError(f"expected header '{MATRIX_MAGIC} <version>'", no)
    if parts[1] != str(MATRIX_VERSION):
        raise ParseError(f"unsupported matrix format version {parts[1]!r}", no)
    if len(lines) < 2:
        raise ParseError("missing shape line", no)
    no, shape = lines[1]
    try:
        rows, cols = (int(t) for t in shape.split())
    except ValueError:
        raise ParseError("shape line must be '<rows> <cols>'", no) from None
    if rows < 1 or cols < 1:
        raise ParseError("rows and cols must be positive", no)
    body = lines[2:]
    if len(body) < rows:
        last = body[-1][0] if body else no
        raise ParseError(f"missing row {len(body)} (expected {rows} rows)", last + 1)
    if len(body) > rows:
        raise ParseError("trailing content after the last row", body[rows][0])
    out = np.empty((rows, cols), dtype=np.complex128)
    for r, (no, line) in enumerate(body):
        toks = line.split()
        if len(toks) != 2 * cols:
            raise ParseError(f"row {r} has {len(toks)} numbers, expected {2 * cols}", no)
        vals = [_float(t, no) for t in toks]
        out[r] = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
    return out


def read_matrix(path) -> np.ndarray:
    return parse_matrix(Path(path).read_text())


def _cplx_rows(a: np.ndarray):
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def _from_cplx_rows(rows) -> np.ndarray:
    a = np.array(rows, dtype=np.float64)
    if a.ndim != 3 or a.shape[-1] != 2:
        raise InvalidInputError("complex arrays are stored as rows of [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def mesh_to_dict(m: MeshDecomposition) -> dict:
    return {
        "dim": m.dim,
        "mzis": [[z.column, z.row, z.theta, z.phi] for z in m.mzis],
        "output_phases": [float(p) for p in m.output_phases],
    }


def mesh_from_dict(d: dict) -> MeshDecomposition:
    mzis = [MziPhase(float(t), float(p), int(r), int(c)) for c, r, t, p in d["mzis"]]
    return MeshDecomposition(int(d["dim"]), tuple(mzis), np.array(d["output_phases"], dtype=np.float64))


def layer_to_dict(f: LayerFactorization, factorized: bool = True) -> dict:
    if not factorized:
        return {"kind": "weight", "weight": _cplx_rows(f.weight)}
    return {
        "kind": "factorized",
        "rows": f.shape[0],
        "cols": f.shape[1],
        "u_mesh": mesh_to_dict(f.u_mesh),
        "sigma": [float(s) for s in f.sigma],
        "v_mesh": mesh_to_dict(f.v_mesh),
        "reflector": list(f.applied_reflector.signs),
    }


def layer_from_dict(d: dict) -> LayerFactorization:
    kind = d.get("kind")
    if kind == "weight":
        return factorize(_from_cplx_rows(d["weight"]))
    if kind == "factorized":
        u_mesh, v_mesh = mesh_from_dict(d["u_mesh"]), mesh_from_dict(d["v_mesh"])
        if (u_mesh.dim, v_mesh.dim) != (d["rows"], d["cols"]):
            raise InvalidInputError("mesh sizes do not match the layer shape")
        return from_meshes(u_mesh, d["sigma"], v_mesh, Reflector(tuple(d["reflector"])))
    raise InvalidInputError(f"unknown layer kind {kind!r}")


def _dump(path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def _load(path, fmt: str) -> dict:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict) or doc.get("format") != fmt:
        raise ParseError(f"not an {fmt} document")
    if doc.get("version") != JSON_VERSION:
        raise ParseError(f"unsupported {fmt} version {doc.get('version')!r}")
    return doc


def network_to_dict(net: Ipnn, factorized: bool = True) -> dict:
    return {
        "format": NETWORK_FORMAT,
        "version": JSON_VERSION,
        "activation": net.activation,
        "threshold": net.threshold,
        "layers": [layer_to_dict(f, factorized) for f in net.layers],
    }


def write_network(path, net: Ipnn, factorized: bool = True) -> None:
    _dump(path, network_to_dict(net, factorized))


def read_network(path) -> Ipnn:
    doc = _load(path, NETWORK_FORMAT)
    try:
        layers = [layer_from_dict(d) for d in doc["layers"]]
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise ParseError(f"malformed layer entry: {exc}") from None
    return Ipnn(tuple(layers), doc.get("activation", "modulus-relu"), float(doc.get("threshold", 0.1)))


def write_dataset(path, ds: Dataset) -> None:
    _dump(path, {
        "format": DATASET_FORMAT,
        "version": JSON_VERSION,
        "inputs": _cplx_rows(ds.inputs),
        "labels": [int(v) for v in ds.labels],
    })


def read_dataset(path) -> Dataset:
    doc = _load(path, DATASET_FORMAT)
    try:
        return Dataset(_from_cplx_rows(doc["inputs"]), np.array(doc["labels"], dtype=np.int64))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed dataset: {exc}") from None


FAMILIES = {
    "fidelity_surface": ("theta", "phi", "inv_fidelity"),
    "sa_trace": ("layer", "trial", "objective"),
    "histogram": ("bin_lo", "bin_hi", "count"),
    # iteration is -1 on summary rows
    "ranked": ("row_type", "f_high", "f_low", "sigma_rel", "iteration",
               "nominal_accuracy", "loss", "std_loss"),
    "robustness": ("row_type", "sigma_rel", "iteration", "conventional_loss", "conventional_std",
                   "optimized_loss", "optimized_std", "loss_reduction_pp"),
}


@dataclass
class ResultsTable:
    family: str
    rows: list = field(default_factory=list)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInputError(f"unknown results family {self.family!r}")

    @property
    def columns(self) -> tuple:
        return FAMILIES[self.family]

    def add(self, *values) -> None:
        if len(values) != len(self.columns):
            raise InvalidInputError(
                f"{self.family} rows have {len(self.columns)} cells, got {len(values)}")
        for v in values:
            if isinstance(v, (float, np.floating)) and not math.isfinite(v):
                raise InvalidInputError(f"non-finite cell in {self.family} table")
        self.rows.append(tuple(values))


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt(v)
    return str(v)


def write_results(table: ResultsTable, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(table.columns)
        for row in table.rows:
            w.writerow([_cell(v) for v in row])


def read_results(path) -> tuple:
    """(header, rows) with every cell left as a string."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("empty results file")
    return tuple(rows[0]), rows[1:]
