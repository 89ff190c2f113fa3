"""Command-line front end.

The CLI is a thin client of the computation service: by default requests go
through the in-process ASGI app, and --server redirects them to a running
instance.  Exit codes: 0 pass, 1 verification mismatch, 2 invalid or
infeasible configuration.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from .reporting import canonical_json, report_to_csv

EXIT_BY_STATUS = {"ok": 0, "mismatch": 1, "infeasible": 2}


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

        from .service.app import app

        return TestClient(app)


def _dispatch(ctx, path: str, payload: dict, out: str | None, fmt: str):
    payload = {k: v for k, v in payload.items() if v is not None}
    with _client(ctx.obj.get("server")) as client:
        resp = client.post(path, json=payload)
    if resp.status_code == 422:
        click.echo(f"invalid request: {resp.text}", err=True)
        sys.exit(2)
    if resp.status_code != 200:
        click.echo(f"service error {resp.status_code}: {resp.text}", err=True)
        sys.exit(2)
    body = resp.json()
    status = body["status"]
    if status == "infeasible":
        click.echo(f"infeasible: {body.get('message', '')}", err=True)
        sys.exit(2)
    report = body["report"]
    text = report_to_csv(report) if fmt == "csv" else canonical_json(report) + "\n"
    if out:
        Path(out).write_text(text)
        click.echo(f"wrote {out}", err=True)
    else:
        click.echo(text, nl=False)
    sys.exit(EXIT_BY_STATUS[status])


@click.group()
@click.option("--server", default=None, help="base URL of a running service; default is in-process")
@click.pass_context
def main(ctx, server):
    """Adjoint-orbit shadows and representation zeta functions over Z/p^r."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


_common = [
    click.option("--threads", type=int, default=None, envvar="SHADOW_ORBITS_THREADS", help="worker count (env SHADOW_ORBITS_THREADS)"),
    click.option("--out", type=click.Path(dir_okay=False), default=None, help="write the report here"),
    click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json"),
]


def common_options(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@main.command()
@click.argument("target", type=click.Choice(["thmA", "thmB", "thmD", "exp", "shadows"]))
@click.option("--algebra", type=click.Choice(["sl2", "sl3", "gl2", "gl3"]), default="sl2")
@click.option("--p", type=int, default=5)
@click.option("--r", type=int, default=1)
@click.option("--samples", type=int, default=1000)
@click.option("--seed", type=int, default=0)
@click.option("--bound", type=int, default=10**7)
@common_options
@click.pass_context
def verify(ctx, target, algebra, p, r, samples, seed, bound, threads, out, fmt):
    """Run one verifier target and exit 0 only if every instance passed."""
    _dispatch(
        ctx,
        "/verify",
        {"target": target, "algebra": algebra, "p": p, "r": r, "samples": samples, "seed": seed, "bound": bound, "threads": threads},
        out,
        fmt,
    )


@main.command()
@click.option("--q", type=int, default=5)
@click.option("--poly-only", is_flag=True, default=False, help="skip the enumeration oracle")
@common_options
@click.pass_context
def table(ctx, q, poly_only, threads, out, fmt):
    """Regenerate the shadow-data table, enumerated and closed-form."""
    _dispatch(ctx, "/table", {"q": q, "oracle": not poly_only, "threads": threads}, out, fmt)


@main.command()
@click.option("--algebra", type=click.Choice(["sl2", "sl3"]), default="sl3")
@click.option("--q", type=int, default=None)
@click.option("--p", type=int, default=None)
@click.option("--m", type=int, default=1)
@click.option("--terms", type=int, default=6)
@click.option("--estimate", is_flag=True, default=False, help="add seeded ESTIMATE cells (never used in checks)")
@click.option("--seed", type=int, default=0)
@common_options
@click.pass_context
def zeta(ctx, algebra, q, p, m, terms, estimate, seed, threads, out, fmt):
    """Zeta function of the m-th principal congruence subgroup."""
    _dispatch(
        ctx,
        "/zeta",
        {"algebra": algebra, "q": q, "p": p, "m": m, "terms": terms, "estimate": estimate, "seed": seed, "threads": threads},
        out,
        fmt,
    )


@main.command()
@click.option("--algebra", type=click.Choice(["sl2", "sl3"]), default="sl3")
@click.option("--p", type=int, default=5)
@click.option("--r", type=int, default=1)
@click.option("--element", required=True, help="square integer matrix as JSON, e.g. [[0,1,0],[0,0,0],[0,0,0]]")
@click.option("--strategy", type=click.Choice(["oracle", "recursive"]), default="oracle")
@common_options
@click.pass_context
def shadow(ctx, algebra, p, r, element, strategy, threads, out, fmt):
    """Shadow record (order, dimensions, label, transition counts) of one element."""
    try:
        mat = json.loads(element)
    except json.JSONDecodeError as exc:
        click.echo(f"--element is not valid JSON: {exc}", err=True)
        sys.exit(2)
    _dispatch(ctx, "/shadow", {"algebra": algebra, "p": p, "r": r, "element": mat, "strategy": strategy}, out, fmt)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the computation service."""
    import uvicorn

    uvicorn.run("shadow_orbits.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
