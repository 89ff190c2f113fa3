"""FastAPI service wrapping the computation core.

Every endpoint is a pure computation: identical requests produce identical
responses (worker counts only change chunking).  Infeasible-but-valid
requests come back with status "infeasible" rather than an HTTP error, so
thin clients can map them to their own exit codes.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI

from ..groups import InfeasibleError, special_linear_order
from ..orbits import shadow_report
from ..parallel import thread_count
from ..rings import LocalRing
from ..verifiers import verify_exponential_suite, verify_lift_theorems, verify_shadow_lemmas
from ..zeta import sl2_zeta_report, sl3_table, sl3_zeta_report
from .models import Health, Report, ShadowRequest, TableRequest, VerifyRequest, ZetaRequest

SERVICE_NAME = "shadow-orbits"
SERVICE_VERSION = "0.1.0"

app = FastAPI(title=SERVICE_NAME, version=SERVICE_VERSION)


@app.get("/health", response_model=Health)
def health() -> Health:
    return Health(status="ok", service=SERVICE_NAME, version=SERVICE_VERSION)


@app.post("/verify", response_model=Report)
def verify(req: VerifyRequest) -> Report:
    try:
        if req.target == "exp":
            algebra = "gl3" if req.algebra in ("sl3", "gl3") else req.algebra
            rep = verify_exponential_suite(algebra, req.p, req.r, samples=req.samples, seed=req.seed)
        elif req.target == "shadows":
            algebra = "sl3" if req.algebra in ("sl3", "gl3") else "sl2"
            rep = verify_shadow_lemmas(algebra, req.p, req.r, samples=req.samples, seed=req.seed)
        else:
            if req.algebra != "sl2":
                raise InfeasibleError(
                    f"exhaustive lift verification needs the sl2 spaces; "
                    f"|SL_3| at level {req.r + 1} is out of reach"
                )
            if special_linear_order(2, LocalRing(req.p, req.r + 1)) > req.bound:
                raise InfeasibleError("the configured group-order bound is exceeded")
            rep = verify_lift_theorems(req.p, req.r, targets=(req.target,))
        status = "ok" if rep.get("passed") else "mismatch"
        return Report(status=status, report=rep)
    except InfeasibleError as exc:
        return Report(status="infeasible", report={}, message=str(exc))


@app.post("/table", response_model=Report)
def table(req: TableRequest) -> Report:
    try:
        if req.oracle and req.q not in (5, 7):
            raise InfeasibleError("oracle mode enumerates q^8 - 1 elements; use q in {5, 7} or oracle=false")
        rep = sl3_table(req.q, threads=thread_count(req.threads), oracle=req.oracle)
        return Report(status="ok" if rep["all_match"] or not req.oracle else "mismatch", report=rep)
    except InfeasibleError as exc:
        return Report(status="infeasible", report={}, message=str(exc))


@app.post("/zeta", response_model=Report)
def zeta(req: ZetaRequest) -> Report:
    try:
        if req.algebra == "sl2":
            rep = sl2_zeta_report(req.p, req.m)
            return Report(status="ok", report=rep)
        rep = sl3_zeta_report(
            req.q,
            req.m,
            terms=req.terms,
            threads=thread_count(req.threads),
            estimate=req.estimate,
            seed=req.seed,
        )
        consistent = rep["identity_with_table_route"] and rep["table_all_match"]
        return Report(status="ok" if consistent else "mismatch", report=rep)
    except InfeasibleError as exc:
        return Report(status="infeasible", report={}, message=str(exc))


@app.post("/shadow", response_model=Report)
def shadow(req: ShadowRequest) -> Report:
    try:
        n = 2 if req.algebra == "sl2" else 3
        rep = shadow_report(np.asarray(req.element, dtype=np.int64), n, req.p, req.r, strategy=req.strategy)
        return Report(status="ok", report=rep)
    except InfeasibleError as exc:
        return Report(status="infeasible", report={}, message=str(exc))
