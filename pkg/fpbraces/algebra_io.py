"""代数/brace 文件与运行报告的读写。

代数文件（JSON）::

    {"format": "fpbraces/algebra", "p": 11, "dim": 5,
     "basis_names": ["a1", ...],
     "products": [{"i": 0, "j": 0, "result": [0, 1, 0, 0, 0]}, ...]}

未列出的 (i, j) 乘积为零，下标从 0 开始。brace 文件的 ``format`` 为
``fpbraces/brace``，``kind`` 取 ``flows``（内嵌代数文档）、``table``
（元素编码的 Cayley 表）或 ``trivial``。

所有写操作都先写临时文件再 ``os.replace``，中断不会留下半个文件。
"""

from __future__ import annotations

import contextlib
import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from fpbraces.brace import Brace
from fpbraces.config import DEFAULTS, Limits
from fpbraces.errors import AlgebraFileError, UsageError
from fpbraces.flows import FlowsContext
from fpbraces.fp_linalg import require_prime
from fpbraces.prelie import MAX_DIM, PreLieAlgebra

logger = logging.getLogger(__name__)

ALGEBRA_FORMAT = "fpbraces/algebra"
BRACE_FORMAT = "fpbraces/brace"

PathLike = Union[str, os.PathLike]


# ---------------------------------------------------------------------------
# 原子写入与摘要
# ---------------------------------------------------------------------------


def atomic_write_text(path: PathLike, text: str) -> None:
    """写入同目录下的临时文件，完成后 ``os.replace`` 到目标路径。"""
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise
    logger.debug("wrote %s (%d bytes)", target, len(text))


def canonical_json(value: Any) -> str:
    return json.dumps(value, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def file_digest(path: PathLike) -> str:
    return "sha256:" + hashlib.sha256(Path(path).read_bytes()).hexdigest()


def text_digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# 代数文档
# ---------------------------------------------------------------------------


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _parse_json(text: str, source: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFileError(
            "parse", f"{source}: {exc.msg}", f"line {exc.lineno} column {exc.colno}"
        ) from None


def _require_object(doc: Any, fmt: str, position: str = "$") -> dict:
    if not isinstance(doc, dict):
        raise AlgebraFileError("bad_format", "document root must be an object", position)
    if doc.get("format", fmt) != fmt:
        raise AlgebraFileError("bad_format", f"expected format {fmt!r}, got {doc.get('format')!r}", f"{position}.format")
    return doc


def _read_prime(doc: dict, position: str) -> int:
    p = doc.get("p")
    if not _is_int(p):
        raise AlgebraFileError("bad_prime", f"p must be an integer, got {p!r}", f"{position}.p")
    try:
        return require_prime(p)
    except UsageError as exc:
        raise AlgebraFileError("bad_prime", str(exc), f"{position}.p") from None


def _read_dim(doc: dict, position: str) -> int:
    dim = doc.get("dim")
    if not _is_int(dim) or not 1 <= dim <= MAX_DIM:
        raise AlgebraFileError("bad_dim", f"dim must be an integer in 1..{MAX_DIM}, got {dim!r}", f"{position}.dim")
    return dim


def algebra_from_document(doc: Any, *, position: str = "$") -> PreLieAlgebra:
    """把已解析的 JSON 文档转为代数（不做公理检查）。

    Raises:
        AlgebraFileError: 格式错误，``code`` 区分错误种类。
    """
    doc = _require_object(doc, ALGEBRA_FORMAT, position)
    p = _read_prime(doc, position)
    dim = _read_dim(doc, position)

    names = doc.get("basis_names")
    if names is not None:
        if not isinstance(names, list) or len(names) != dim or not all(isinstance(n, str) for n in names):
            raise AlgebraFileError(
                "bad_format", f"basis_names must be a list of {dim} strings", f"{position}.basis_names"
            )

    products = doc.get("products", [])
    if not isinstance(products, list):
        raise AlgebraFileError("bad_format", "products must be a list", f"{position}.products")
    table = np.zeros((dim, dim, dim), dtype=np.int64)
    seen: dict[tuple[int, int], int] = {}
    for n, entry in enumerate(products):
        where = f"{position}.products[{n}]"
        if not isinstance(entry, dict) or not {"i", "j", "result"} <= set(entry):
            raise AlgebraFileError("bad_format", "product entries need keys i, j, result", where)
        i, j, result = entry["i"], entry["j"], entry["result"]
        for key, value in (("i", i), ("j", j)):
            if not _is_int(value) or not 0 <= value < dim:
                raise AlgebraFileError("index_out_of_range", f"{key}={value!r} not in 0..{dim - 1}", f"{where}.{key}")
        if (i, j) in seen:
            raise AlgebraFileError(
                "duplicate_product", f"product ({i}, {j}) already given at products[{seen[(i, j)]}]", where
            )
        seen[(i, j)] = n
        if not isinstance(result, list) or len(result) != dim:
            raise AlgebraFileError("bad_entry", f"result must be a list of {dim} integers", f"{where}.result")
        for k, value in enumerate(result):
            if not _is_int(value) or not 0 <= value < p:
                raise AlgebraFileError(
                    "bad_entry", f"coefficient {value!r} not in 0..{p - 1}", f"{where}.result[{k}]"
                )
        table[i, j] = result
    return PreLieAlgebra(p, dim, table, tuple(names) if names is not None else None)


def algebra_to_document(algebra: PreLieAlgebra) -> dict:
    """稀疏文档：只列出非零乘积，按 (i, j) 排序。"""
    doc: dict[str, Any] = {"format": ALGEBRA_FORMAT, "p": algebra.p, "dim": algebra.dim}
    if algebra.basis_names is not None:
        doc["basis_names"] = list(algebra.basis_names)
    doc["products"] = [
        {"i": int(i), "j": int(j), "result": [int(v) for v in algebra.table[i, j]]}
        for i, j in zip(*np.nonzero(algebra.table.any(axis=2)))
    ]
    return doc


def dumps_algebra(algebra: PreLieAlgebra) -> str:
    doc = algebra_to_document(algebra)
    # 每个乘积占一行，便于阅读和比较
    lines = ["{"]
    lines.append(f'  "format": {json.dumps(doc["format"])},')
    lines.append(f'  "p": {doc["p"]},')
    lines.append(f'  "dim": {doc["dim"]},')
    if "basis_names" in doc:
        lines.append(f'  "basis_names": {json.dumps(doc["basis_names"], ensure_ascii=False)},')
    if doc["products"]:
        lines.append('  "products": [')
        body = [f"    {json.dumps(entry)}" for entry in doc["products"]]
        lines.append(",\n".join(body))
        lines.append("  ]")
    else:
        lines.append('  "products": []')
    lines.append("}")
    return "\n".join(lines) + "\n"


def loads_algebra(text: str, *, source: str = "<string>") -> PreLieAlgebra:
    return algebra_from_document(_parse_json(text, source))


def load_algebra(path: PathLike) -> PreLieAlgebra:
    """读取代数文件。

    Raises:
        AlgebraFileError: 文件格式错误。
        UsageError: 文件无法读取。
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    algebra = loads_algebra(text, source=str(path))
    logger.debug("loaded %s: p=%d dim=%d", path, algebra.p, algebra.dim)
    return algebra


def save_algebra(algebra: PreLieAlgebra, path: PathLike) -> None:
    atomic_write_text(path, dumps_algebra(algebra))


# ---------------------------------------------------------------------------
# brace 文档
# ---------------------------------------------------------------------------


def brace_to_document(brace: Brace) -> dict:
    doc: dict[str, Any] = {"format": BRACE_FORMAT, "kind": brace.kind, "p": brace.p, "dim": brace.dim}
    if brace.kind == "flows":
        doc["algebra"] = algebra_to_document(brace.flows.algebra)
        doc["index"] = brace.flows.index
    elif brace.kind == "table":
        doc["table"] = brace.table.tolist()
    return doc


def brace_from_document(doc: Any, *, limits: Limits = DEFAULTS) -> Brace:
    """由文档构造 brace（不做 brace 公理检查）。

    Raises:
        AlgebraFileError: 格式错误。
        PreconditionError: flows 文档的 p 不大于幂零指数。
    """
    doc = _require_object(doc, BRACE_FORMAT)
    if "format" not in doc:
        raise AlgebraFileError("bad_format", f"missing format {BRACE_FORMAT!r}", "$.format")
    p = _read_prime(doc, "$")
    dim = _read_dim(doc, "$")
    kind = doc.get("kind")
    if kind == "trivial":
        return Brace.trivial(p, dim)
    if kind == "flows":
        algebra = algebra_from_document(doc.get("algebra"), position="$.algebra")
        if (algebra.p, algebra.dim) != (p, dim):
            raise AlgebraFileError("bad_format", "embedded algebra disagrees with p/dim", "$.algebra")
        index = doc.get("index")
        if index is not None and not _is_int(index):
            raise AlgebraFileError("bad_format", f"index must be an integer, got {index!r}", "$.index")
        return Brace.from_flows(FlowsContext.from_algebra(algebra, index))
    if kind == "table":
        table = doc.get("table")
        if not isinstance(table, list):
            raise AlgebraFileError("bad_format", "table must be a list of rows", "$.table")
        try:
            return Brace.from_table(p, dim, table, limits)
        except (UsageError, ValueError) as exc:
            raise AlgebraFileError("bad_entry", str(exc), "$.table") from None
    raise AlgebraFileError("bad_format", f"unknown brace kind {kind!r}", "$.kind")


def dumps_brace(brace: Brace) -> str:
    return json.dumps(brace_to_document(brace), indent=2, ensure_ascii=False) + "\n"


def load_brace(path: PathLike, *, limits: Limits = DEFAULTS) -> Brace:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return brace_from_document(_parse_json(text, str(path)), limits=limits)


def save_brace(brace: Brace, path: PathLike) -> None:
    atomic_write_text(path, dumps_brace(brace))


# ---------------------------------------------------------------------------
# 运行报告
# ---------------------------------------------------------------------------


@dataclass
class RunReport:
    """一次 CLI 命令的结构化结果。

    除 ``timing`` 外的字段只依赖输入与种子；``timing`` 仅在显式要求时写出。
    """

    command: str
    input_digest: Optional[str] = None
    seed: Optional[int] = None
    counts: dict[str, Any] = field(default_factory=dict)
    violations: list[Any] = field(default_factory=list)
    chain_dims: dict[str, list[int]] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)
    timing: Optional[dict[str, float]] = None

    def as_dict(self, include_timing: bool = False) -> dict:
        out: dict[str, Any] = {
            "command": self.command,
            "input_digest": self.input_digest,
            "seed": self.seed,
            "counts": self.counts,
            "violations": self.violations,
            "chain_dims": self.chain_dims,
            "details": self.details,
        }
        if include_timing and self.timing is not None:
            out["timing"] = {k: round(v, 6) for k, v in self.timing.items()}
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return canonical_json(_plain(self.as_dict(include_timing)))

    def write(self, path: PathLike, include_timing: bool = False) -> None:
        atomic_write_text(path, self.to_json(include_timing))


def _plain(value: Any) -> Any:
    """把 numpy 标量、元组等转成 JSON 原生类型。"""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


# ---------------------------------------------------------------------------
# 分类普查
# ---------------------------------------------------------------------------


def format_fingerprint(fp: tuple) -> str:
    strong, left, right, comm = fp
    return "/".join([*(".".join(str(d) for d in dims) for dims in (strong, left, right)), str(comm)])


def census_text(result) -> str:
    """普查文件：``#`` 开头的计数头，之后每个指纹类代表一行

    ``case, p, name=value..., fingerprint, accepted, count``。
    """
    census = result.census
    rejected = ",".join(f"{k}:{v}" for k, v in census.rejected.items())
    lines = [
        "# fpbraces census",
        f"# case={census.case_id} p={census.p} mode={census.mode} "
        f"seed={'-' if census.seed is None else census.seed}",
        f"# domain={census.domain_size} examined={census.examined} "
        f"excluded_by_relations={'-' if census.excluded_by_relations is None else census.excluded_by_relations}",
        f"# accepted={census.accepted} rejected={rejected} printed_nonzero={census.printed_nonzero}",
    ]
    for cand in result.candidates:
        fp = cand.fingerprint()
        fields = [cand.case_id, str(census.p)]
        fields.extend(f"{name}={value}" for name, value in cand.params)
        fields.append(format_fingerprint(fp))
        fields.append("accepted" if cand.accepted else f"rejected:{cand.rejection}")
        fields.append(str(census.fingerprints.get(fp, 0)))
        lines.append(", ".join(fields))
    return "\n".join(lines) + "\n"


def write_census(result, path: PathLike) -> None:
    atomic_write_text(path, census_text(result))


__all__ = [
    "ALGEBRA_FORMAT",
    "BRACE_FORMAT",
    "atomic_write_text",
    "canonical_json",
    "file_digest",
    "text_digest",
    "algebra_from_document",
    "algebra_to_document",
    "dumps_algebra",
    "loads_algebra",
    "load_algebra",
    "save_algebra",
    "brace_to_document",
    "brace_from_document",
    "dumps_brace",
    "load_brace",
    "save_brace",
    "RunReport",
    "format_fingerprint",
    "census_text",
    "write_census",
]
