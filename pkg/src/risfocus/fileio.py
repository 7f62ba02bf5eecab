"""Scenario/codebook JSON documents and CSV/grid exports.

Angles are degrees in every file and radians in memory. Scenario floats are
written with 12 significant digits, so a written-then-loaded scenario writes
back byte-identically.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from collections.abc import Iterable, Mapping
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .geometry import AngleDirection, ArrayGeometry, Wave
from .ris import PhaseVector
from .scenario import BS, LinkRays, Node, Placement, Ray, Scenario


class FormatError(ValueError):
    """A file does not follow its schema; the message names the offending field."""


_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_COUNT = {"type": "integer", "minimum": 1}
_ANGLE = {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}
_ID = {"oneOf": [{"type": "integer", "minimum": 1}, {"const": BS}]}
_ARRAY = {
    "type": "object",
    "required": ["position_m", "yaw_deg", "nx", "nz", "dx_over_lambda", "dz_over_lambda",
                 "ucx_over_lambda", "ucz_over_lambda"],
    "properties": {
        "id": {"type": "integer", "minimum": 1},
        "position_m": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
        "yaw_deg": _NUM,
        "nx": _COUNT, "nz": _COUNT,
        "dx_over_lambda": _POS, "dz_over_lambda": _POS,
        "ucx_over_lambda": _POS, "ucz_over_lambda": _POS,
    },
}

SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["wave", "bs", "ris", "links", "seed", "delta_a_deg"],
    "properties": {
        "wave": {"type": "object", "required": ["wavelength_m"],
                 "properties": {"wavelength_m": _POS}},
        "bs": _ARRAY,
        "ris": {"type": "array", "minItems": 1, "items": _ARRAY},
        "links": {"type": "array", "items": {
            "type": "object",
            "required": ["from", "to", "rays"],
            "properties": {
                "from": _ID, "to": _ID,
                "rays": {"type": "array", "minItems": 1, "items": {
                    "type": "object", "required": ["aod_deg", "aoa_deg"],
                    "properties": {"aod_deg": _ANGLE, "aoa_deg": _ANGLE}}},
            }}},
        "seed": {"type": ["integer", "null"]},
        "delta_a_deg": {"type": "number", "minimum": 0},
    },
}

CODEBOOK_SCHEMA = {
    "type": "object",
    "required": ["source", "nx", "nz", "codebooks"],
    "properties": {
        "source": {"type": "integer", "minimum": 1},
        "nx": _COUNT, "nz": _COUNT,
        "codebooks": {"type": "object", "minProperties": 1, "additionalProperties": {
            "type": "array", "items": {
                "type": "object", "required": ["target", "phases_rad"],
                "properties": {"target": {"type": "integer", "minimum": 1},
                               "phases_rad": {"type": "array", "items": _NUM}}}}},
    },
}


def provenance(command: str | None, seed=None) -> dict:
    return {"tool": f"risfocus {__version__}", "command": command or "", "seed": seed}


def comment_header(prov: Mapping) -> str:
    return "".join(f"# {k}: {'' if v is None else v}\n" for k, v in prov.items())


def atomic_write(path, text: str) -> Path:
    """Write ``text`` through a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
    return path


def _validate(doc, schema, what):
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in exc.absolute_path)
        raise FormatError(f"{what}{where or ' (top level)'}: {exc.message}") from None


def _sig(x: float) -> float:
    return float(f"{float(x):.12g}")


def _deg(rad: float, wrap: bool = False) -> float:
    d = _sig(math.degrees(rad))
    if wrap and d >= 360.0:
        d = _sig(d - 360.0)
    return d + 0.0  # no negative zero


def _angle_out(a: AngleDirection) -> list[float]:
    return [_deg(a.elevation), _deg(a.azimuth, wrap=True)]


def _angle_in(pair, where) -> AngleDirection:
    try:
        return AngleDirection.from_degrees(*pair)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


def _array_out(node: Node, lam: float) -> dict:
    g = node.geometry
    out = {} if node.id == BS else {"id": node.id}
    out.update({
        "position_m": [_sig(v) + 0.0 for v in node.placement.position],
        "yaw_deg": _deg(node.placement.yaw, wrap=True),
        "nx": g.nx, "nz": g.nz,
        "dx_over_lambda": _sig(g.dx / lam), "dz_over_lambda": _sig(g.dz / lam),
        "ucx_over_lambda": _sig(g.unit_cell_x / lam),
        "ucz_over_lambda": _sig(g.unit_cell_z / lam),
    })
    return out


def _array_in(doc: dict, wave: Wave, rid, where) -> Node:
    lam = wave.wavelength
    try:
        geom = ArrayGeometry(doc["nx"], doc["nz"], doc["dx_over_lambda"] * lam,
                             doc["dz_over_lambda"] * lam, doc["ucx_over_lambda"] * lam,
                             doc["ucz_over_lambda"] * lam)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None
    return Node(rid, Placement(doc["position_m"], math.radians(doc["yaw_deg"])), geom)


def scenario_to_dict(scn: Scenario, command: str | None = None) -> dict:
    lam = scn.wave.wavelength
    links = []
    for (a, b), link in scn.links.items():
        links.append({"from": a, "to": b, "rays": [
            {"aod_deg": _angle_out(r.aod), "aoa_deg": _angle_out(r.aoa)} for r in link.rays]})
    return {
        "provenance": provenance(command, scn.seed),
        "wave": {"wavelength_m": _sig(lam)},
        "bs": _array_out(scn.bs, lam),
        "ris": [_array_out(n, lam) for n in scn.ris],
        "links": links,
        "seed": scn.seed,
        "delta_a_deg": _deg(scn.angle_spread),
    }


def scenario_from_dict(doc) -> Scenario:
    _validate(doc, SCENARIO_SCHEMA, "scenario")
    wave = Wave(doc["wave"]["wavelength_m"])
    bs = _array_in(doc["bs"], wave, BS, "scenario.bs")
    ris = []
    for k, item in enumerate(doc["ris"]):
        rid = item.get("id", k + 1)
        ris.append(_array_in(item, wave, rid, f"scenario.ris[{k}]"))
    links = {}
    for k, item in enumerate(doc["links"]):
        key = (item["from"], item["to"])
        if key in links:
            raise FormatError(f"scenario.links[{k}]: duplicate link {key[0]}->{key[1]}")
        rays = tuple(
            Ray(_angle_in(r["aod_deg"], f"scenario.links[{k}].rays[{q}].aod_deg"),
                _angle_in(r["aoa_deg"], f"scenario.links[{k}].rays[{q}].aoa_deg"))
            for q, r in enumerate(item["rays"]))
        links[key] = LinkRays(key[0], key[1], rays)
    try:
        return Scenario(bs, tuple(ris), links, wave, seed=doc["seed"],
                        angle_spread=math.radians(doc["delta_a_deg"]))
    except ValueError as exc:
        raise FormatError(f"scenario.links: {exc}") from None


def dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def save_scenario(scn: Scenario, path, command: str | None = None) -> Path:
    return atomic_write(path, dumps(scenario_to_dict(scn, command)))


def _read_json(path, what):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{what} {path}: invalid JSON ({exc})") from None


def load_scenario(path) -> Scenario:
    return scenario_from_dict(_read_json(path, "scenario"))


def codebook_to_dict(source, books: Mapping[str, Mapping], geometry: ArrayGeometry,
                     command: str | None = None, seed=None, extras: Mapping | None = None
                     ) -> dict:
    """``books`` maps method -> {target: PhaseVector}; ``extras`` maps method -> {target: dict}."""
    extras = extras or {}
    out = {"provenance": provenance(command, seed), "source": source,
           "nx": geometry.nx, "nz": geometry.nz, "codebooks": {}}
    for method, book in books.items():
        entries = []
        for target, code in book.items():
            entry = {"target": target, "phases_rad": [float(p) for p in code.phases]}
            entry.update(extras.get(method, {}).get(target, {}))
            entries.append(entry)
        out["codebooks"][method] = entries
    return out


def codebook_from_dict(doc, geometry: ArrayGeometry | None = None) -> tuple[int, dict]:
    """Returns ``(source, {method: {target: PhaseVector}})``."""
    _validate(doc, CODEBOOK_SCHEMA, "codebook")
    if geometry is None:
        geometry = ArrayGeometry(doc["nx"], doc["nz"], 1.0, 1.0, 1.0, 1.0)
    elif (geometry.nx, geometry.nz) != (doc["nx"], doc["nz"]):
        raise FormatError(f"codebook.nx/nz: {doc['nx']}x{doc['nz']} does not match the "
                          f"RIS geometry {geometry.nx}x{geometry.nz}")
    books = {}
    for method, entries in doc["codebooks"].items():
        book = {}
        for k, e in enumerate(entries):
            if len(e["phases_rad"]) != geometry.n:
                raise FormatError(f"codebook.codebooks.{method}[{k}].phases_rad: expected "
                                  f"{geometry.n} phases, got {len(e['phases_rad'])}")
            book[e["target"]] = PhaseVector.from_phases(e["phases_rad"], geometry)
        books[method] = book
    return doc["source"], books


def load_codebook(path, geometry: ArrayGeometry | None = None) -> tuple[int, dict]:
    return codebook_from_dict(_read_json(path, "codebook"), geometry)


CSV_FIELDS = ["source", "focus", "leak_or_intended", "l2", "l1", "value", "method", "seed"]


def _fmt(v: float) -> str:
    return f"{float(v):.12g}"


def map_rows(entries: np.ndarray, source, focus, leak=None, method=None, seed=None
             ) -> list[list]:
    """CSV rows for one map; ray indices are 1-based with the LoS ray first."""
    tag = "intended" if leak is None else leak
    rows = []
    for l2, row in enumerate(np.asarray(entries), start=1):
        for l1, value in enumerate(row, start=1):
            rows.append([source, focus, tag, l2, l1, _fmt(value), method or "",
                         "" if seed is None else seed])
    return rows


def csv_text(rows: Iterable[list], fields=CSV_FIELDS, prov: Mapping | None = None) -> str:
    buf = io.StringIO()
    if prov:
        buf.write(comment_header(prov))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    w.writerows(rows)
    return buf.getvalue()


def grid_text(entries: np.ndarray, prov: Mapping | None = None, label: str = "") -> str:
    """Dense matrix for heatmaps: comment lines, one header line, then one row per l2."""
    lines = [comment_header(prov)] if prov else []
    lines.append(f"# rows=l2, cols=l1{(' ' + label) if label else ''}\n")
    for row in np.asarray(entries):
        lines.append(" ".join(_fmt(v) for v in row) + "\n")
    return "".join(lines)
