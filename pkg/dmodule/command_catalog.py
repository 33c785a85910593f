from __future__ import annotations

from copy import deepcopy
from typing import Any

CommandDef = dict[str, Any]

_EXIT_CODES = {"0": "success or verified", "1": "verification failure or computational error", "2": "usage error"}

COMMAND_CATALOG: dict[str, dict[str, Any]] = {
    "commands": {
        "category": "system",
        "tags": ["diagnostic", "catalog"],
        "summary": "List the available commands and their metadata.",
        "preferred_usage": "Call first to see what the tool can do.",
        "workflow_order": 0,
    },
    "indicial": {
        "category": "analysis",
        "tags": ["frobenius", "classification"],
        "summary": "Classify the expansion point, print the indicial polynomial, its roots and resonances.",
        "preferred_usage": "Run before solve with an xd:LAMBDA divisor to pick a non-resonant root.",
        "workflow_order": 10,
    },
    "solve": {
        "category": "series",
        "tags": ["newton", "remainder-map", "exact"],
        "summary": "Expand a formal solution by Newton iteration on the remainder map of the chosen divisor.",
        "preferred_usage": "Divisor d at ordinary points, xd:LAMBDA at regular singular points, x for distributional solutions.",
        "workflow_order": 20,
    },
    "divide": {
        "category": "algebra",
        "tags": ["division", "weyl", "ore"],
        "summary": "Divide an operator by a monic divisor; Weyl normal form or rational-coefficient Ore division.",
        "preferred_usage": "Use --ore for divisors that are not monic first order.",
        "workflow_order": 30,
    },
    "heun-eigen": {
        "category": "eigen",
        "tags": ["heun", "remainder-matrix", "accessory-parameter"],
        "summary": "Build the remainder matrix of a Heun-type operator, solve for accessory parameters and factor exponents.",
        "preferred_usage": "Pass --epsilon or --delta as a negative integer so the polynomial subspace is invariant.",
        "workflow_order": 40,
    },
    "factor-check": {
        "category": "eigen",
        "tags": ["factorization", "ore", "verification"],
        "summary": "Right-divide the Heun operator with q* by its first-order factor and report the remainder.",
        "preferred_usage": "Run after heun-eigen on the accessory parameter it returned.",
        "workflow_order": 50,
    },
    "identity-check": {
        "category": "eigen",
        "tags": ["hypergeometric", "identity", "verification"],
        "summary": "Compare the factorization series with the generalized hypergeometric series coefficient by coefficient.",
        "preferred_usage": "Exact for rational data; floating data uses the configured tolerance.",
        "workflow_order": 60,
    },
    "difference": {
        "category": "realization",
        "tags": ["difference", "falling-factorial", "bessel"],
        "summary": "Evaluate the difference realization of a series or the difference Bessel function.",
        "preferred_usage": "Use --bessel N --x X for the difference Bessel value; add --check to apply the difference operator.",
        "workflow_order": 70,
    },
    "fixtures": {
        "category": "regression",
        "tags": ["corpus", "oracle"],
        "summary": "Run the regression corpus and compare every coefficient against its closed form.",
        "preferred_usage": "Run after changing the solver; --name limits the run to one fixture.",
        "workflow_order": 90,
    },
}


def enrich_command_definition(command: CommandDef) -> CommandDef:
    """Attach catalog metadata to a base command definition."""
    enriched = deepcopy(command)
    entry = COMMAND_CATALOG.get(command["name"], {})
    enriched.update({
        "category": entry.get("category", "uncategorized"),
        "tags": list(entry.get("tags", [])),
        "summary": entry.get("summary", ""),
        "preferred_usage": entry.get("preferred_usage", ""),
        "recommended_workflow_order": entry.get("workflow_order", 999),
        "exit_codes": dict(_EXIT_CODES),
    })
    return enriched


def list_commands() -> list[CommandDef]:
    items = [enrich_command_definition({"name": name}) for name in COMMAND_CATALOG]
    return sorted(items, key=lambda item: item["recommended_workflow_order"])


def command_summary(name: str) -> str:
    return COMMAND_CATALOG.get(name, {}).get("summary", "")
