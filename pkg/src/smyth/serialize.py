"""JSON documents and CSV tables for certificates and reports.

Document kinds and what verify_doc re-checks for each, with no state beyond
the document itself:

  balanced     balanced multiset with its canonical permutation certificate;
               membership, balance, and certificate binding are all re-derived
  certificate  permutation certificate; kernel relations and row sums re-checked
  extremal     extremal triple; order-bound arithmetic recomputed from scratch
  numfield     doubly regular matrix over a quadratic field; permutation split,
               eigen identity, and singularity re-checked exactly

Emission is canonical (sorted keys, fixed indentation, deterministic list
orders), so serialize -> parse -> serialize is byte-stable.
"""
from __future__ import annotations

import csv
import io
import json
from typing import Optional, Sequence

from .algebra import FieldParams, Poly, parse_poly
from .bounds import ExtremalInstance, OrderBoundCertificate, verify_extremal
from .core import (
    BalancedMultiset,
    CoeffTuple,
    PermutationCertificate,
    balanced_from_certificate,
    certificate_from_balanced,
    verify_certificate,
)
from .errors import NoRelationError, ParseError
from .numfield import NumfieldCertificate, matrix_fixes, verify_numfield_certificate
from .quadratic import QuadField, format_quadint, parse_quadint

VERIFIABLE_KINDS = ("balanced", "certificate", "extremal", "numfield")


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def parse_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"invalid JSON at line {err.lineno} column {err.colno}: "
                         f"{err.msg}") from err
    if not isinstance(doc, dict):
        raise ParseError("expected a JSON object at the top level")
    return doc


def _one_based(perms: Sequence[Sequence[int]]) -> list[list[int]]:
    return [[k + 1 for k in p] for p in perms]


def _zero_based(perms: Sequence[Sequence[int]], m: int) -> Optional[list[tuple[int, ...]]]:
    out = []
    for p in perms:
        row = [k - 1 for k in p]
        if len(row) != m or sorted(row) != list(range(m)):
            return None
        out.append(tuple(row))
    return out


def multiset_doc(b: BalancedMultiset, kind: str = "balanced",
                 N: Optional[int] = None) -> dict:
    """Schema document for a balanced multiset or its certificate.

    Both kinds share the field set; "balanced" marks a document whose primary
    object is the multiset (the certificate is its canonical conversion),
    "certificate" the reverse. tuples are embedded either way so a reader
    can inspect the members without running the kernel solver.
    """
    if kind not in ("balanced", "certificate"):
        raise ValueError("kind must be balanced or certificate")
    first = b.coeffs[0]
    cert = certificate_from_balanced(b.coeffs, b)
    doc: dict = {"kind": kind, "n": b.n, "m": cert.m, "N": N}
    if isinstance(first, Poly):
        doc["ring"] = "fqt"
        doc["q"] = first.field.q
        doc["coeffs"] = [str(c) for c in b.coeffs]
        doc["kernel_vector"] = [str(v) for v in cert.kernel]
        doc["tuples"] = [[str(v) for v in row] for row in b.members]
    elif isinstance(first, int):
        doc["ring"] = "int"
        doc["coeffs"] = list(b.coeffs)
        doc["kernel_vector"] = list(cert.kernel)
        doc["tuples"] = [list(row) for row in b.members]
    else:
        raise ValueError("only polynomial and integer multisets serialize to this schema")
    doc["permutations"] = _one_based(cert.perms)
    return doc


def extremal_doc(inst: ExtremalInstance) -> dict:
    cert = inst.certificate
    doc: dict = {
        "kind": "extremal",
        "ring": inst.ring,
        "D": inst.D,
        "claimed_min": inst.claimed_min,
        "order": cert.order,
        "group_order": cert.group_order,
        "generator_flag": cert.generator_flag,
        "degenerate": inst.degenerate,
    }
    if inst.ring == "fqt":
        doc["q"] = inst.triple[0].field.q
        doc["triple"] = [str(p) for p in inst.triple]
    else:
        doc["triple"] = list(inst.triple)
    return doc


def numfield_doc(cert: NumfieldCertificate) -> dict:
    K = cert.field
    return {
        "kind": "numfield",
        "m": K.m,
        "omega": K.omega_label,
        "alpha": format_quadint(cert.alpha),
        "n": cert.n,
        "dimension": len(cert.matrix),
        "matrix": [list(row) for row in cert.matrix],
        "permutations": _one_based(cert.perms),
        "eigenvector": [format_quadint(v) for v in cert.eigenvector],
        "radius_squared": str(cert.radius_squared),
        "covering_radius_squared": str(cert.covering_radius_squared),
        "strategy": cert.strategy,
    }


def _require(doc: dict, *keys: str):
    missing = [k for k in keys if k not in doc]
    if missing:
        raise ParseError(f"document is missing fields: {', '.join(missing)}")


def _verify_fqt_multiset(doc: dict) -> bool:
    _require(doc, "q", "n", "coeffs", "m", "permutations", "kernel_vector")
    field = FieldParams(int(doc["q"]))
    coeffs = [parse_poly(field, s) for s in doc["coeffs"]]
    a = CoeffTuple.make(field, coeffs)
    m = int(doc["m"])
    perms = _zero_based(doc["permutations"], m)
    if perms is None or len(perms) != a.n:
        return False
    kernel = tuple(parse_poly(field, s) for s in doc["kernel_vector"])
    if len(kernel) != m:
        return False
    cert = PermutationCertificate(m=m, perms=tuple(perms), kernel=kernel)
    try:
        if not verify_certificate(a, cert):
            return False
    except ValueError:
        return False
    if "tuples" in doc:
        members = [tuple(parse_poly(field, s) for s in row) for row in doc["tuples"]]
        try:
            b = BalancedMultiset.make(a.coeffs, members, validate=True)
        except ValueError:
            return False
        if certificate_from_balanced(a.coeffs, b) != cert:
            return False
        try:
            balanced_from_certificate(a, cert.perms)
        except NoRelationError:
            return False
    return True


def _verify_int_multiset(doc: dict) -> bool:
    _require(doc, "n", "coeffs", "m", "permutations", "kernel_vector")
    coeffs = tuple(int(c) for c in doc["coeffs"])
    n = int(doc["n"])
    if len(coeffs) != n or any(c == 0 for c in coeffs):
        return False
    m = int(doc["m"])
    perms = _zero_based(doc["permutations"], m)
    if perms is None or len(perms) != n:
        return False
    if perms[-1] != tuple(range(m)):
        return False
    kernel = tuple(int(v) for v in doc["kernel_vector"])
    if len(kernel) != m or not any(kernel):
        return False
    for k in range(m):
        if sum(c * kernel[p[k]] for c, p in zip(coeffs, perms)) != 0:
            return False
    if "tuples" in doc:
        members = [tuple(int(v) for v in row) for row in doc["tuples"]]
        try:
            b = BalancedMultiset.make(coeffs, members, validate=True)
        except ValueError:
            return False
        cert = PermutationCertificate(m=m, perms=tuple(perms), kernel=kernel)
        if certificate_from_balanced(coeffs, b) != cert:
            return False
    return True


def _verify_extremal(doc: dict) -> bool:
    _require(doc, "ring", "D", "claimed_min", "order", "group_order",
             "generator_flag", "triple")
    ring = doc["ring"]
    if ring == "fqt":
        _require(doc, "q")
        field = FieldParams(int(doc["q"]))
        triple = tuple(parse_poly(field, s) for s in doc["triple"])
    elif ring == "int":
        triple = tuple(int(v) for v in doc["triple"])
    else:
        raise ParseError(f"unknown ring {ring!r}")
    cert = OrderBoundCertificate(
        triple=triple,
        order=int(doc["order"]),
        group_order=int(doc["group_order"]),
        generator_flag=bool(doc["generator_flag"]),
    )
    inst = ExtremalInstance(
        ring=ring,
        triple=triple,
        D=int(doc["D"]),
        claimed_min=int(doc["claimed_min"]),
        certificate=cert,
        degenerate=bool(doc.get("degenerate", False)),
    )
    try:
        return verify_extremal(inst)
    except ValueError:
        return False


def _verify_numfield(doc: dict) -> bool:
    _require(doc, "m", "omega", "alpha", "n", "matrix", "permutations",
             "eigenvector")
    K = QuadField(int(doc["m"]))
    if doc["omega"] != K.omega_label:
        return False
    alpha = parse_quadint(K, doc["alpha"])
    n = int(doc["n"])
    matrix = tuple(tuple(int(v) for v in row) for row in doc["matrix"])
    dim = len(matrix)
    if any(len(row) != dim for row in matrix):
        return False
    perms = _zero_based(doc["permutations"], dim)
    if perms is None or len(perms) != n - 1:
        return False
    summed = [[0] * dim for _ in range(dim)]
    for p in perms:
        for k, image in enumerate(p):
            summed[k][image] += 1
    if tuple(map(tuple, summed)) != matrix:
        return False
    vec = tuple(parse_quadint(K, s) for s in doc["eigenvector"])
    if len(vec) != dim or not any(bool(v) for v in vec):
        return False
    if not matrix_fixes(matrix, vec, alpha):
        return False
    try:
        return verify_numfield_certificate(alpha, n, perms)
    except ValueError:
        return False


def verify_doc(doc: dict) -> bool:
    """Re-verify a parsed certificate document from first principles."""
    kind = doc.get("kind")
    if kind in ("balanced", "certificate"):
        ring = doc.get("ring", "fqt")
        if ring == "fqt":
            return _verify_fqt_multiset(doc)
        if ring == "int":
            return _verify_int_multiset(doc)
        raise ParseError(f"unknown ring {ring!r}")
    if kind == "extremal":
        return _verify_extremal(doc)
    if kind == "numfield":
        return _verify_numfield(doc)
    raise ParseError(
        f"kind {kind!r} is not verifiable; expected one of {VERIFIABLE_KINDS}")


def csv_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(list(row))
    return buf.getvalue()
