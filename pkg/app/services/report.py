import io
import logging
import time
from typing import Iterable, List, Optional

import click
import numpy as np
import pandas as pd

from app.config import settings
from app.models.solution import (
    SOLUTION_COLUMNS, reproduce_row_helper, scan_point_helper, solution_row_helper,
)
from app.schemas.geometry import StructureDescription
from app.schemas.report import Report
from app.schemas.structure import UnimodularStructure
from app.services.algebra import (
    AnyStructure, VectorLike, milnor_invariant, mu_constants, signature_classify,
)
from app.services.classify import classify, compare, verify_component
from app.services.geometry import (
    connection_table, phi_sectional, ricci, rough_laplacian_matrix, sectional_curvatures,
)
from app.services.magnetic import check_field, uvw
from app.services.reproduce import reproduce_table
from app.services.scan import numeric_scan

logger = logging.getLogger(__name__)

FORMATS = ("md", "json", "csv")


# ==================== BUILDERS ====================

def describe_structure(s: AnyStructure) -> StructureDescription:
    if isinstance(s, UnimodularStructure):
        mu = mu_constants(s)
        phi = phi_sectional(s) if abs(s.c1 - 2.0) < settings.eps_sym else None
        return StructureDescription(
            signature=signature_classify(s).tag.value,
            constants=mu.model_dump(),
            connection=connection_table(s),
            ricci=ricci(s),
            sectional=sectional_curvatures(s),
            rough_laplacian=np.asarray(rough_laplacian_matrix(s)).tolist(),
            phi_sectional=phi,
        )
    return StructureDescription(
        milnor_invariant=milnor_invariant(s),
        constants=uvw(s).model_dump(),
        connection=connection_table(s),
        ricci=ricci(s),
        sectional=sectional_curvatures(s),
        rough_laplacian=np.asarray(rough_laplacian_matrix(s)).tolist(),
    )


def _tolerance(tolerance: Optional[float]) -> float:
    return settings.eps_res if tolerance is None else tolerance


def describe_report(s: AnyStructure, tolerance: Optional[float] = None) -> Report:
    return Report(mode="describe", structure=s, tolerance=_tolerance(tolerance), description=describe_structure(s))


def check_report(
    s: AnyStructure,
    x: VectorLike,
    q: Optional[float] = None,
    tolerance: Optional[float] = None,
) -> Report:
    result = check_field(s, x, q, tolerance)
    return Report(mode="check", structure=s, tolerance=_tolerance(tolerance), check=result)


def solve_report(
    s: AnyStructure,
    mode: str = "symbolic",
    grid_n: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> Report:
    """mode is one of symbolic, numeric, both."""
    report = Report(mode="solve", structure=s, tolerance=_tolerance(tolerance))
    if mode in ("symbolic", "both"):
        solution_set = classify(s)
        report.solution_set = solution_set
        report.component_residuals = [verify_component(s, c) for c in solution_set.components]
    if mode in ("numeric", "both"):
        report.scan = numeric_scan(s, grid_n=grid_n, tolerance=tolerance)
    if mode == "both":
        report.match = compare(report.solution_set, report.scan)
    return report


def reproduce_report(
    family: str,
    samples: Optional[int] = None,
    seed: Optional[int] = None,
    grid_n: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> Report:
    matrix = reproduce_table(family, samples=samples, seed=seed, grid_n=grid_n, tolerance=tolerance)
    return Report(mode="reproduce", tolerance=_tolerance(tolerance), reproduce=matrix)


def timed(build, *args, **kwargs) -> Report:
    start = time.perf_counter()
    report = build(*args, **kwargs)
    report.timing = time.perf_counter() - start
    return report


def exit_code(report: Report) -> int:
    """0 success, 1 not magnetic (check), 3 verification mismatch."""
    if report.mode == "check":
        return 0 if report.check.magnetic else 1
    if report.mode == "solve":
        return 3 if report.match is not None and not report.match.matched else 0
    if report.mode == "reproduce":
        return 0 if report.reproduce.passed else 3
    return 0


# ==================== RENDERING ====================

def _num(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.12g}"


def _table(headers: List[str], rows: Iterable[Iterable]) -> List[str]:
    lines = ["| " + " | ".join(headers) + " |", "|" + "---|" * len(headers)]
    for row in rows:
        lines.append("| " + " | ".join(str(v) for v in row) + " |")
    return lines


def _status(ok: bool, yes: str, no: str, color: bool) -> str:
    word = yes if ok else no
    return click.style(word, fg="green" if ok else "red", bold=True) if color else word


def _markdown(report: Report, color: bool) -> str:
    title = report.structure.label() if report.structure is not None else report.reproduce.family
    lines = [f"# {report.mode}: {title}", ""]

    if report.description is not None:
        d = report.description
        if d.signature is not None:
            lines.append(f"- signature: {d.signature}")
        if d.milnor_invariant is not None:
            lines.append(f"- Milnor invariant D: {_num(d.milnor_invariant)}")
        lines.extend(f"- {name}: {_num(v)}" for name, v in d.constants.items())
        lines.append("- principal Ricci: " + ", ".join(_num(v) for v in d.ricci.principal))
        lines.append(f"- scalar curvature: {_num(d.ricci.scalar)}")
        lines.append(
            f"- sectional: K12 = {_num(d.sectional.k12)}, K13 = {_num(d.sectional.k13)}, "
            f"K23 = {_num(d.sectional.k23)}"
        )
        if d.phi_sectional is not None:
            p = d.phi_sectional
            lines.append(
                f"- phi-sectional: {_num(p.phi_k)} (kappa = {_num(p.kappa)}, mu = {_num(p.mu)}, "
                f"sasakian = {p.sasakian})"
            )
        lines += ["", "## Connection (nabla_{e_i} e_j)", ""]
        gamma = d.connection.array()
        rows = [
            (f"e{i + 1}", f"e{j + 1}", *(_num(v) for v in gamma[i, j]))
            for i in range(3) for j in range(3)
        ]
        lines += _table(["i", "j", "e1", "e2", "e3"], rows)

    if report.check is not None:
        c = report.check
        lines.append("- x: " + ", ".join(_num(v) for v in c.x.as_tuple()))
        if c.q is not None:
            lines.append(f"- q: {_num(c.q)}")
        lines.append(f"- first residual: {c.first_norm:.3e}")
        lines.append(f"- second residual: {c.second_norm:.3e}")
        lines.append(f"- solved charge: {c.solved_q.label() if c.solved_q else 'none'}")
        lines.append("- verdict: " + _status(c.magnetic, "magnetic", "not magnetic", color))

    if report.solution_set is not None:
        lines += [f"## Solution set ({report.solution_set.case_label})", ""]
        residuals = report.component_residuals or [None] * len(report.solution_set.components)
        rows = [
            (c.describe(), f"{r:.3e}" if r is not None else "")
            for c, r in zip(report.solution_set.components, residuals)
        ]
        lines += _table(["component", "max residual"], rows) if rows else ["(empty)"]
        lines.append("")

    if report.scan is not None:
        st = report.scan.stats
        lines += [
            f"## Numeric scan (grid {report.scan.grid_n}^2)", "",
            f"- seeds: {st.seeds}, converged: {st.converged}, failed: {st.failed}",
            f"- iterations: max {st.max_iterations}, mean {st.mean_iterations:.2f}",
            f"- distinct points: {len(report.scan.points)}",
            "",
        ]

    if report.match is not None:
        m = report.match
        lines += ["## Comparison", ""]
        rows = [(cm.component.describe(), cm.hits, cm.required, cm.matched) for cm in m.components]
        if rows:
            lines += _table(["component", "hits", "required", "matched"], rows)
        lines.append(f"- unmatched scan points: {len(m.unmatched_points)}")
        lines.append("- result: " + _status(m.matched, "MATCH", "MISMATCH", color))

    if report.reproduce is not None:
        r = report.reproduce
        lines += [f"- samples per row: {r.samples}, seed: {r.seed}, grid: {r.grid_n}^2", ""]
        rows = [
            (row.row, sum(s.matched for s in row.samples), len(row.samples),
             _status(row.passed, "pass", "FAIL", color))
            for row in r.rows
        ]
        lines += _table(["row", "matched", "samples", "status"], rows)
        lines += ["", "- result: " + _status(r.passed, "PASS", "FAIL", color)]

    if report.timing is not None:
        lines.append(f"- time: {report.timing:.3f} s")
    return "\n".join(lines).rstrip() + "\n"


def _csv(report: Report) -> str:
    if report.reproduce is not None:
        frame = pd.DataFrame([reproduce_row_helper(row) for row in report.reproduce.rows])
    elif report.check is not None:
        c = report.check
        frame = pd.DataFrame([{
            "x1": c.x.x1, "x2": c.x.x2, "x3": c.x.x3, "q": c.q,
            "first_norm": c.first_norm, "second_norm": c.second_norm,
            "q_kind": c.solved_q.kind if c.solved_q else None,
            "q_value": c.solved_q.value if c.solved_q else None,
            "magnetic": c.magnetic,
        }])
    elif report.description is not None:
        d = report.description
        values = {"signature": d.signature, "milnor_invariant": d.milnor_invariant, **d.constants}
        values.update({f"rho{i + 1}": v for i, v in enumerate(d.ricci.principal)})
        values.update({"scalar": d.ricci.scalar, **d.sectional.model_dump()})
        frame = pd.DataFrame([{"key": k, "value": v} for k, v in values.items() if v is not None])
    else:
        rows = []
        if report.solution_set is not None:
            residuals = report.component_residuals or [None] * len(report.solution_set.components)
            rows += [solution_row_helper(c, r) for c, r in zip(report.solution_set.components, residuals)]
        if report.scan is not None:
            rows += [scan_point_helper(p) for p in report.scan.points]
        frame = pd.DataFrame(rows, columns=SOLUTION_COLUMNS)
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def render(report: Report, fmt: str = "md", color: bool = False) -> str:
    if fmt == "json":
        return report.model_dump_json(indent=2) + "\n"
    if fmt == "csv":
        return _csv(report)
    if fmt == "md":
        return _markdown(report, color)
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
