"""Command line interface: `singcol invariants | collide | verify | tables | diagram`."""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from .algebra import Polynomial
from .catalog import TypeName, normal_form, parse_type_name, recognize
from .collisions import (
    CollisionData,
    CollisionResult,
    collide_ade,
    collide_cuspfree_omp,
    collide_omp_omp,
    collide_sqh_omp,
)
from .errors import DomainError, NotTabulatedError, ParseError, UnsupportedCaseError
from .flatlimit import collision_system, flat_limit, verify_collision
from .invariants import invariant_record, milnor_local, multiplicity
from .newton import NewtonDiagram, nnd_check, poly_diagram, same_type
from .render import ascii_diagram, svg_diagram

EXIT_DOMAIN = 1
EXIT_USAGE = 2


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


# --- argument parsing -------------------------------------------------------------


def _type_arg(ctx, param, value):
    if value is None:
        return None
    try:
        return parse_type_name(value)
    except DomainError as e:
        raise click.BadParameter(str(e), ctx, param)


def _poly_arg(ctx, param, value):
    if value is None:
        return None
    try:
        return Polynomial.parse(value)
    except DomainError as e:
        raise click.BadParameter(str(e), ctx, param)


def _diagram_arg(ctx, param, value):
    if value is None:
        return None
    try:
        return NewtonDiagram.from_json(json.loads(value))
    except (ValueError, TypeError, KeyError) as e:
        raise click.BadParameter(f"not a vertex list: {e}", ctx, param)


def _data_arg(ctx, param, value):
    try:
        return CollisionData.parse(value)
    except DomainError as e:
        raise click.BadParameter(str(e), ctx, param)


def _one_input(type_, poly, diagram):
    given = [v for v in (type_, poly, diagram) if v is not None]
    if len(given) != 1:
        raise click.UsageError("give exactly one of --type, --poly, --diagram")


# --- collision dispatch --------------------------------------------------------------


def _convenient(name: TypeName) -> NewtonDiagram:
    return normal_form(name).diagram.convenient_form()


def omp_mult(name: TypeName) -> int | None:
    d = _convenient(name)
    m = d.multiplicity()
    return m if same_type(d, NewtonDiagram(((0, m), (m, 0)))) else None


def cusp_order(name: TypeName) -> int | None:
    """p when the type is x^p + y^(p+1)."""
    d = _convenient(name)
    p = d.multiplicity()
    return p if p >= 2 and same_type(d, NewtonDiagram(((0, p + 1), (p, 0)))) else None


def collide_types(x: TypeName, y: TypeName, data: CollisionData,
                  variant: int = 1) -> list[CollisionResult]:
    """Closed-form rules first, then the ADE arrow lists."""
    mx, my = omp_mult(x), omp_mult(y)
    if mx and my:
        if mx < my:
            raise click.UsageError("order the inputs so that mult(--x) >= mult(--y)")
        return [collide_omp_omp(mx - 1, my - 1)]
    if my:
        p = cusp_order(x)
        if p:
            if variant == 2:
                if p < 3:
                    raise UnsupportedCaseError("the second cusp variant starts at x^3 + y^4")
                return [collide_sqh_omp(2, p - 1, my - 1, data)]
            return [collide_sqh_omp(1, p, my - 1, data)]
        if x.series == "CUSPFREE":
            return [collide_cuspfree_omp(x.indices[0], x.indices[1], my - 1, data)]
    if x.series in "ADE" and y.series in "ADE":
        return collide_ade(x, y)
    raise NotTabulatedError(f"no rule covers {x} + {y}")


# --- commands ----------------------------------------------------------------------------


@click.group()
@click.version_option(package_name="artifact")
def cli():
    """Collisions of plane curve singularities."""


@cli.command()
@click.option("--type", "type_", callback=_type_arg, help="catalog name, e.g. A3, omp(4)")
@click.option("--poly", callback=_poly_arg, help='polynomial literal, e.g. "y^2*x + x^5"')
@click.option("--diagram", callback=_diagram_arg, help="vertex list JSON, e.g. [[0,3],[2,2],[6,0]]")
def invariants(type_, poly, diagram):
    """Print mult, mu, r, delta, kappa as JSON."""
    _one_input(type_, poly, diagram)
    if type_ is not None:
        rec = invariant_record(_convenient(type_))
        click.echo(_dump(rec.to_json()))
        return
    if diagram is not None:
        click.echo(_dump(invariant_record(diagram).to_json()))
        return
    d = poly_diagram(poly)
    nnd = nnd_check(poly, d)
    if not nnd:
        multiplicity(poly)
        click.echo(_dump({"diagram": d.to_json(), "nnd": False, "mu": milnor_local(poly)}))
        raise DomainError("polynomial is degenerate on its diagram; branch count not determined")
    rec = invariant_record(poly)
    out = rec.to_json()
    out.update({"diagram": d.to_json(), "nnd": True})
    click.echo(_dump(out))


_COMMON = [
    click.option("--x", "x", required=True, callback=_type_arg, help="type at the fixed point"),
    click.option("--y", "y", required=True, callback=_type_arg, help="type at the moving point"),
    click.option("--data", default="", callback=_data_arg,
                 help="comma list from l=lx, l!=lx, l=ly, lx=ly"),
    click.option("--variant", type=click.IntRange(1, 2), default=1,
                 help="cusp normal form: 1 for x^p+y^(p+1), 2 for x^(p+1)+y^(p+2)"),
]


def _common(f):
    for opt in reversed(_COMMON):
        f = opt(f)
    return f


@cli.command()
@_common
def collide(x, y, data, variant):
    """Predicted collision results, one JSON line each."""
    for res in collide_types(x, y, data, variant):
        click.echo(_dump(res.to_json()))


@cli.command()
@_common
@click.option("--jet-degree", type=click.IntRange(2, None), default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--range", "coef_range", type=click.IntRange(1, None), default=9, show_default=True)
@click.option("--emit-limit-system", type=click.Path(dir_okay=False, writable=True), default=None)
@click.pass_context
def verify(ctx, x, y, data, variant, jet_degree, seed, coef_range, emit_limit_system):
    """Run the flat-limit lab and compare with the prediction(s)."""
    predictions = collide_types(x, y, data, variant)
    reports = [verify_collision(p, x, y, data, jet_degree, seed, coef_range) for p in predictions]
    for rep in reports:
        click.echo(_dump(rep.to_json()))
    if emit_limit_system:
        Path(emit_limit_system).write_text(_dump(reports[0].limit.to_json()) + "\n")
    # an ADE pair lists several possible results; one matching is enough
    if not any(r.ok for r in reports):
        ctx.exit(1)


@cli.command()
@click.option("--type", "type_", callback=_type_arg)
@click.option("--poly", callback=_poly_arg)
@click.option("--diagram", callback=_diagram_arg)
@click.option("--format", "fmt", type=click.Choice(["ascii", "svg"]), default="ascii")
@click.option("--svg", "svg_path", type=click.Path(dir_okay=False, writable=True), default=None,
              help="write the SVG rendering to this file")
def diagram(type_, poly, diagram, fmt, svg_path):
    """Draw a Newton diagram."""
    _one_input(type_, poly, diagram)
    support = None
    if type_ is not None:
        d = _convenient(type_)
    elif poly is not None:
        d, support = poly_diagram(poly), poly.support()
    else:
        d = diagram
    if svg_path:
        Path(svg_path).write_text(svg_diagram(d))
    if fmt == "svg":
        click.echo(svg_diagram(d), nl=False)
    else:
        click.echo(ascii_diagram(d, support), nl=False)


# --- tables ---------------------------------------------------------------------------------

TABLES = ("omp-omp", "cusp-omp", "cuspfree-omp", "ade", "dk")


def _cells(which: str, pmax: int, qmax: int | None, rmax: int) -> list[tuple]:
    cells = []
    if which == "omp-omp":
        for p in range(1, pmax + 1):
            for q in range(1, min(p, qmax or p) + 1):
                cells.append(("omp-omp", p, q))
    elif which == "cusp-omp":
        for p in range(2, pmax + 1):
            for q in range(1, min(p - 1, qmax or p) + 1):
                for flag in ("l=lx", "l!=lx"):
                    cells.append(("cusp-omp", p, q, flag))
    elif which == "cuspfree-omp":
        for p in range(2, pmax + 1):
            for r in range(1, rmax + 1):
                for q in range(1, min(p + r, qmax or p + r) + 1):
                    for flag in ("l=lx", "l!=lx"):
                        cells.append(("cuspfree-omp", p, r, q, flag))
    elif which in ("ade", "dk"):
        if which == "ade":
            xs = [f"A{k}" for k in range(1, pmax + 1)] + [f"D{k}" for k in range(4, pmax + 4)]
            xs += ["E6", "E7", "E8"]
            ys = [f"A{k}" for k in range(1, (qmax or pmax) + 1)]
        else:
            xs = [f"D{k}" for k in range(4, pmax + 4)]
            ys = [f"A{k}" for k in range(1, (qmax or pmax) + 1)]
        for x in xs:
            for y in ys:
                try:
                    n = len(collide_ade(x, y))
                except NotTabulatedError:
                    continue
                cells += [("ade", x, y, i) for i in range(n)]
        if which == "ade":
            for y in ("D4", "D5", "D6"):
                cells += [("ade", "D4", y, i) for i in range(len(collide_ade("D4", y)))]
    return cells


def _cell_prediction(cell: tuple) -> tuple[CollisionResult, dict]:
    kind = cell[0]
    if kind == "omp-omp":
        _, p, q = cell
        return collide_omp_omp(p, q), {"p": p, "q": q}
    if kind == "cusp-omp":
        _, p, q, flag = cell
        return collide_sqh_omp(1, p, q, CollisionData.parse(flag)), {"p": p, "q": q, "data": flag}
    if kind == "cuspfree-omp":
        _, p, r, q, flag = cell
        return (collide_cuspfree_omp(p, r, q, CollisionData.parse(flag)),
                {"p": p, "r": r, "q": q, "data": flag})
    _, x, y, i = cell
    return collide_ade(x, y)[i], {"x": x, "y": y}


def _lab_for_ade(res: CollisionResult) -> bool:
    """Does some tangency choice of the lab produce the arrow's target?"""
    for flag in ("l=lx", "l!=lx"):
        data = CollisionData.parse(flag)
        x, y = res.x_type, res.y_type
        if x is not None and y is not None and _convenient(x).multiplicity() < _convenient(y).multiplicity():
            x, y = y, x
        n = 2 * (_convenient(x).multiplicity() + _convenient(y).multiplicity() + res.invariants.mu)
        stair = flat_limit(collision_system(x, y, data, n)).staircase()
        if same_type(stair, res.result_diagram):
            return True
    return False


def table_row(cell: tuple, verify: bool = False, seed: int = 0) -> dict:
    try:
        res, params = _cell_prediction(cell)
    except UnsupportedCaseError as e:
        return {"table": cell[0], "params": list(cell[1:]), "status": "unsupported", "detail": str(e)}
    row = {
        "table": cell[0], "params": params, "status": "ok", "case": res.rule_id,
        "type": [str(n) for n in res.result_names] or None,
        "diagram": [list(v) for v in res.result_diagram.vertices],
        "mu": res.invariants.mu, "delta": res.invariants.delta, "kappa": res.invariants.kappa,
    }
    if res.formula_checks:
        row["tabulated"] = {k: a for k, (a, _) in res.formula_checks.items()}
    if res.flags:
        row["flags"] = list(res.flags)
    if verify:
        try:
            if cell[0] == "ade":
                row["verified"] = _lab_for_ade(res)
            else:
                rep = verify_collision(res, seed=seed)
                row["verified"] = rep.ok
                row["jet_degree"], row["seed"] = rep.jet_degree, rep.seed
                if not rep.ok:
                    row["lab"] = {k: s for k, (ok, s) in rep.checks.items() if not ok}
        except UnsupportedCaseError as e:
            row["verified"] = False
            row["lab"] = {"unsupported": str(e)}
    return row


def _pool_size() -> int:
    raw = os.environ.get("SINGCOL_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise click.UsageError(f"SINGCOL_THREADS must be an integer, got {raw!r}")
    return min(4, os.cpu_count() or 1)


def _row_task(args):
    return table_row(*args)


def build_table(which: str, pmax: int, qmax: int | None = None, rmax: int = 3,
                verify: bool = False, seed: int = 0, workers: int = 1) -> list[dict]:
    tasks = [(c, verify, seed) for c in _cells(which, pmax, qmax, rmax)]
    if workers <= 1 or len(tasks) <= 1:
        return [_row_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_row_task, tasks))  # map keeps cell order


def _fmt_row(row: dict) -> str:
    params = row["params"]
    ptxt = ",".join(f"{k}={v}" for k, v in params.items()) if isinstance(params, dict) else str(params)
    if row["status"] != "ok":
        return f"{ptxt:<28} {'unsupported':<34} {row['detail']}"
    name = "/".join(row["type"]) if row["type"] else str(tuple(map(tuple, row["diagram"])))
    cells = []
    for key in ("mu", "delta", "kappa"):
        v = str(row[key])
        tab = row.get("tabulated", {}).get(key)
        if tab is not None and tab != row[key]:
            v += f"(tab {tab})"
        cells.append(f"{v:<12}")
    line = f"{ptxt:<28} {row['case']:<34} {name:<28} " + " ".join(cells)
    if "verified" in row:
        line += " verified" if row["verified"] else " NOT-VERIFIED"
    return line.rstrip()


@cli.command()
@click.option("--which", type=click.Choice(TABLES), required=True)
@click.option("--pmax", type=click.IntRange(1, None), default=4, show_default=True)
@click.option("--qmax", type=click.IntRange(1, None), default=None)
@click.option("--rmax", type=click.IntRange(1, None), default=3, show_default=True)
@click.option("--verify", "run_lab", is_flag=True, help="check every cell with the flat-limit lab")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--json", "as_json", is_flag=True, help="JSON lines instead of a text table")
@click.pass_context
def tables(ctx, which, pmax, qmax, rmax, run_lab, seed, as_json):
    """Recompute a collision table from its rule diagrams."""
    rows = build_table(which, pmax, qmax, rmax, run_lab, seed, _pool_size() if run_lab else 1)
    if as_json:
        for row in rows:
            click.echo(_dump(row))
    else:
        header = f"{'params':<28} {'case':<34} {'type':<28} {'mu':<12} {'delta':<12} {'kappa':<12}"
        click.echo(header + (" lab" if run_lab else ""))
        for row in rows:
            click.echo(_fmt_row(row))
    if run_lab and not all(r.get("verified") for r in rows):
        ctx.exit(1)


# --- entry point -------------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="singcol", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return EXIT_DOMAIN
    except DomainError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_DOMAIN
    return rv if isinstance(rv, int) else 0


def run() -> None:
    sys.exit(main())
