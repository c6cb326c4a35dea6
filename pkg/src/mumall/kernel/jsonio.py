"""JSON encoding of proofs and focussed proofs.

Plain node::

    {"sequent": [...], "rule": "tensor",
     "params": {"principal": 2, "split": [[0], [1]]},
     "premises": [...]}

A schematic nu premise is a single entry ``{"schematic": {"var", "bound",
"constraints": ["a < b"], "body": node}}`` in ``premises``.  Focussed
nodes carry ``"zone"`` (a list) or ``"focus"`` (a formula string), and
``"sequent"`` holds the context.
"""

from __future__ import annotations

import json
import re
from typing import Any

from ..ordinal import OrdinalError, OrdVar, format_ordinal, parse_ordinal
from ..syntax import Ann, format_formula, parse_formula
from .focus import FocusProof
from .proof import Proof, ProofError, Schematic

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


def ann_to_str(a: Ann) -> str:
    return a.name if isinstance(a, OrdVar) else format_ordinal(a)


def parse_ann(text: str) -> Ann:
    text = text.strip()
    try:
        return parse_ordinal(text)
    except OrdinalError:
        if _IDENT.fullmatch(text) and text != "w":
            return OrdVar(text)
        raise


def _f(text: str):
    return parse_formula(text, alpha=None)


def proof_to_json(p: Proof) -> dict[str, Any]:
    params: dict[str, Any] = {}
    if p.principal is not None:
        params["principal"] = p.principal
    if p.side is not None:
        params["side"] = p.side
    if p.gamma is not None:
        params["gamma"] = ann_to_str(p.gamma)
    if p.split is not None:
        params["split"] = [list(s) for s in p.split]
    if p.cut is not None:
        params["cut"] = format_formula(p.cut)
    out: dict[str, Any] = {"sequent": [format_formula(f) for f in p.conclusion], "rule": p.rule}
    if params:
        out["params"] = params
    if p.schematic is not None:
        s = p.schematic
        out["premises"] = [{"schematic": {
            "var": s.var,
            "bound": ann_to_str(s.bound),
            "constraints": [f"{ann_to_str(a)} < {ann_to_str(b)}" for a, b in s.constraints],
            "body": proof_to_json(s.body),
        }}]
    elif p.premises:
        out["premises"] = [proof_to_json(k) for k in p.premises]
    return out


def proof_from_json(d: dict[str, Any]) -> Proof:
    try:
        params = d.get("params", {})
        prem = d.get("premises", [])
        schematic = None
        kids: list[Proof] = []
        for k in prem:
            if "schematic" in k:
                if len(prem) != 1:
                    raise ProofError("a schematic premise must be the only premise")
                s = k["schematic"]
                cons = []
                for c in s.get("constraints", []):
                    a, _, b = c.partition("<")
                    cons.append((parse_ann(a), parse_ann(b)))
                schematic = Schematic(s["var"], parse_ann(s["bound"]), proof_from_json(s["body"]), tuple(cons))
            else:
                kids.append(proof_from_json(k))
        split = params.get("split")
        return Proof(
            tuple(_f(t) for t in d["sequent"]),
            d["rule"],
            tuple(kids),
            principal=params.get("principal"),
            side=params.get("side"),
            gamma=parse_ann(params["gamma"]) if "gamma" in params else None,
            split=tuple(tuple(s) for s in split) if split is not None else None,
            cut=_f(params["cut"]) if "cut" in params else None,
            schematic=schematic,
        )
    except (KeyError, TypeError, AttributeError) as e:
        raise ProofError(f"malformed proof node: {e!r}") from None


def focus_to_json(p: FocusProof) -> dict[str, Any]:
    out: dict[str, Any] = {"sequent": [format_formula(f) for f in p.context], "rule": p.rule}
    if p.zone is not None:
        out["zone"] = [format_formula(f) for f in p.zone]
    else:
        out["focus"] = format_formula(p.focus)
    params: dict[str, Any] = {}
    if p.principal is not None:
        params["principal"] = p.principal
    if p.side is not None:
        params["side"] = p.side
    if p.gamma is not None:
        params["gamma"] = ann_to_str(p.gamma)
    if p.split is not None:
        params["split"] = list(p.split)
    if params:
        out["params"] = params
    if p.premises:
        out["premises"] = [focus_to_json(k) for k in p.premises]
    return out


def focus_from_json(d: dict[str, Any]) -> FocusProof:
    try:
        params = d.get("params", {})
        split = params.get("split")
        if split is not None and split and isinstance(split[0], list):
            split = split[0]  # also accept the two-part form
        return FocusProof(
            tuple(_f(t) for t in d["sequent"]),
            d["rule"],
            tuple(focus_from_json(k) for k in d.get("premises", [])),
            focus=_f(d["focus"]) if "focus" in d else None,
            zone=tuple(_f(t) for t in d["zone"]) if "zone" in d else None,
            principal=params.get("principal"),
            side=params.get("side"),
            gamma=parse_ann(params["gamma"]) if "gamma" in params else None,
            split=tuple(split) if split is not None else None,
        )
    except (KeyError, TypeError, AttributeError) as e:
        raise ProofError(f"malformed focussed proof node: {e!r}") from None


def is_focus_json(d: dict[str, Any]) -> bool:
    return "zone" in d or "focus" in d


def load(text: str) -> Proof | FocusProof:
    d = json.loads(text)
    return focus_from_json(d) if is_focus_json(d) else proof_from_json(d)


def dump(p: Proof | FocusProof, indent: int | None = None) -> str:
    d = focus_to_json(p) if isinstance(p, FocusProof) else proof_to_json(p)
    return json.dumps(d, indent=indent, ensure_ascii=False)
