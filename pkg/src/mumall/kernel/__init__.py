"""Proof objects, checkers and standard derivations."""

from .proof import (
    RULES, Proof, ProofError, Schematic, Unsupported, OrdContext, Reject,
    complete, cut_node, find, has_cut, id_proof, instantiate_schematic, links,
    node, nu_premise, principal_of, replace_occurrence, same_multiset, subst_proof,
)
from .check import VALID, Verdict, check_proof
from .focus import FocusProof, check_focus_proof, erase_focus, replace_context
from .generators import (
    additive_units_proof, bridge, eta_expand_identity, functoriality, monotonicity_proof,
)
from .jsonio import dump, focus_from_json, focus_to_json, load, proof_from_json, proof_to_json

__all__ = [
    "RULES", "Proof", "ProofError", "Schematic", "Unsupported", "OrdContext", "Reject",
    "complete", "cut_node", "find", "has_cut", "id_proof", "instantiate_schematic", "links",
    "node", "nu_premise", "principal_of", "replace_occurrence", "same_multiset", "subst_proof",
    "VALID", "Verdict", "check_proof",
    "FocusProof", "check_focus_proof", "erase_focus", "replace_context",
    "additive_units_proof", "bridge", "eta_expand_identity", "functoriality", "monotonicity_proof",
    "dump", "focus_from_json", "focus_to_json", "load", "proof_from_json", "proof_to_json",
]
