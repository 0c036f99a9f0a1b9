"""
Report rendering

Turns engine results into the three output formats: a plain text report,
machine-readable newline-delimited JSON records headed by a schema line, and
Graphviz DOT. Rendering is pure; callers decide where the text goes.
"""

import json
from typing import Any, Dict, Iterable, List, Optional, Sequence

from automata import Dfa
from clone_engine import TreeReport
from unary_engine import GeneralizationReport, TypeReport, word_text


SCHEMA = "agu/1"


def _set(elements: Sequence[str]) -> str:
    return "{" + ",".join(elements) + "}"


def _record(data: Dict[str, Any]) -> str:
    return json.dumps(data, ensure_ascii=False)


def header(query: Dict[str, Any]) -> str:
    return _record({"schema": SCHEMA, "query": query})


def echo_text(query: Dict[str, Any]) -> str:
    parts = [str(query.get("query"))]
    parts.extend(query.get("inputs", []))
    for key in ("left", "right"):
        if query.get(key):
            parts.append(f"{key}={','.join(query[key])}")
    return " ".join(parts)


def _summary(report) -> str:
    parts = [report.cardinality.label, "trivial" if report.trivial else "nontrivial"]
    if isinstance(report, GeneralizationReport) and report.language.is_universal():
        parts.append("Σ*")
    if report.approximate:
        parts.append(f"approximate (terms up to size {report.search_bound})")
    return "; ".join(parts)


def render_generalizations(report, query: Dict[str, Any], fmt: str = "text",
                           witnesses: int = 5, k: Optional[int] = None,
                           duration_s: Optional[float] = None) -> str:
    """
    Render a GeneralizationReport or TreeReport.

    Args:
        report: Engine result
        query: Query echo (the validated config)
        fmt: text, machine or dot
        witnesses: How many language members to list in text output
        k: Variable count for clone results, printed as a closing note
        duration_s: Query time, only in machine output
    """
    if fmt == "dot":
        return report_dot(report)
    if fmt == "machine":
        lines = [header(query)]
        for (first, second), witness in zip(report.minimal_pairs, report.witnesses):
            lines.append(_record({
                "record": "minimal_pair",
                "first": list(first),
                "second": list(second),
                "witness": str(witness),
            }))
        lines.append(_record({
            "record": "summary",
            "cardinality": report.cardinality.label,
            "terms": report.cardinality.count,
            "classes": report.classes,
            "trivial": report.trivial,
            "approximate": report.approximate,
            "k": k,
            "members": [str(t) for t in report.members(witnesses)],
            "duration_s": duration_s,
        }))
        return "\n".join(lines) + "\n"

    lines = [
        f"query: {echo_text(query)}",
        f"left: {_set(report.left)}",
        f"right: {_set(report.right)}",
        f"minimal pairs: {report.classes}",
    ]
    for (first, second), witness in zip(report.minimal_pairs, report.witnesses):
        lines.append(f"  {_set(first)} / {_set(second)}  witness {witness}")
    lines.append(f"terms: {report.cardinality.label}")
    lines.append(f"classes: {report.classes}")
    lines.append(f"trivial: {'yes' if report.trivial else 'no'}")
    members = report.members(witnesses)
    if members:
        lines.append("members: " + ", ".join(str(t) for t in members))
    lines.append(f"summary: {_summary(report)}")
    if k is not None:
        lines.append(f"note: results are relative to k = {k}")
    return "\n".join(lines) + "\n"


def report_dot(report) -> str:
    if isinstance(report, GeneralizationReport):
        return report.language.to_dot("minimal_generalizations")
    if report.clone is None:
        raise ValueError("Bounded fragment searches have no automaton to draw")
    return report.clone.to_dot(report.finals, "minimal_generalizations")


def render_up_set(dfa: Dfa, element: str, query: Dict[str, Any], fmt: str = "text",
                  witnesses: int = 5) -> str:
    """Render the ↑a recognizer of the gens query."""
    if fmt == "dot":
        return dfa.to_dot(f"up_{element}")
    words = list(dfa.words(limit=witnesses))
    cardinality = dfa.cardinality()
    if fmt == "machine":
        return "\n".join([
            header(query),
            _record({
                "record": "up_set",
                "element": element,
                "states": dfa.size,
                "minimal_states": dfa.minimize().size,
                "cardinality": cardinality.label,
                "universal": dfa.is_universal(),
                "members": [word_text(w) for w in words],
            }),
        ]) + "\n"
    lines = [
        f"query: {echo_text(query)}",
        f"element: {element}",
        f"states: {dfa.size} (minimal {dfa.minimize().size})",
        f"words: {cardinality.label}",
        f"universal: {'yes' if dfa.is_universal() else 'no'}",
    ]
    if words:
        lines.append("members: " + ", ".join(word_text(w) for w in words))
    return "\n".join(lines) + "\n"


def render_type(result: TypeReport, query: Dict[str, Any], fmt: str = "text",
                k: Optional[int] = None) -> str:
    if fmt == "dot":
        raise ValueError("The type query has no DOT output")
    if fmt == "machine":
        lines = [header(query)]
        for a, b, label, trivial in result.pairs:
            lines.append(_record({"record": "pair", "left": a, "right": b,
                                  "label": label, "trivial": trivial}))
        lines.append(_record({"record": "summary", "labels": list(result.labels),
                              "label": result.label, "k": k}))
        return "\n".join(lines) + "\n"
    lines = [f"query: {echo_text(query)}"]
    for a, b, label, trivial in result.pairs:
        lines.append(f"  {a} {b}: {label}{' trivial' if trivial else ''}")
    lines.append(f"type: {result.label}")
    if k is not None:
        lines.append(f"note: results are relative to k = {k}")
    return "\n".join(lines) + "\n"


def render_check(name: str, problem: Optional[str], query: Dict[str, Any], fmt: str = "text") -> str:
    if fmt == "machine":
        return "\n".join([
            header(query),
            _record({"record": "check", "algebra": name, "ok": problem is None, "error": problem}),
        ]) + "\n"
    return (f"ok: {name}" if problem is None else f"invalid: {problem}") + "\n"


def render_charset(verdict: bool, terms: Iterable[str], element: str, k: int,
                   query: Dict[str, Any], fmt: str = "text") -> str:
    terms = list(terms)
    if fmt == "machine":
        return "\n".join([
            header(query),
            _record({"record": "characteristic_set", "element": element, "terms": terms,
                     "k": k, "characteristic": verdict}),
        ]) + "\n"
    lines = [
        f"query: {echo_text(query)}",
        f"terms: {', '.join(terms)}",
        f"characteristic for {element}: {'yes' if verdict else 'no'}",
        f"note: results are relative to k = {k}",
    ]
    return "\n".join(lines) + "\n"


def render_selftest(results: List[Dict[str, Any]], query: Dict[str, Any], fmt: str = "text") -> str:
    mismatches = sum(r["mismatches"] for r in results)
    if fmt == "machine":
        lines = [header(query)]
        lines.extend(_record({"record": "selftest", **r}) for r in results)
        lines.append(_record({"record": "summary", "mismatches": mismatches}))
        return "\n".join(lines) + "\n"
    lines = [f"{r['check']}: {r['cases']} cases, {r['mismatches']} mismatches" for r in results]
    lines.append(f"mismatches: {mismatches}")
    return "\n".join(lines) + "\n"
