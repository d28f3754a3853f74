"""HTTP service exposing the certification pipeline.

A thin FastAPI wrapper over the library: every endpoint is a pure function
of its request (plus module-level caches), so responses are deterministic
and safe to serve concurrently.  The CLI talks to this app in-process
through an ASGI transport by default; pointing it at a remote instance
changes nothing but the transport.

Error contract: domain validation problems (bad dimensions, degenerate
geometry, out-of-range arguments) surface as 400/422 with ``kind:
"usage"``; numerical failures (bracketing, pole collisions) as 500 with
``kind: "numerical"``.  Non-finite samples are emitted as JSON null so the
payload stays strict-JSON parseable.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .certify import MARGIN_GUARD, ZigzagCertificate, reproduce_tables, zigzag_search
from .rearrange import run_lemma_corpus, verify_comparison
from .roots import BISECT_TOL, DirectedValue, get_constants, mu
from .special_functions import DimensionParams, f_nu, f_nu_prime, g_nu, s_nu
from .two_ball import necessary_condition

DEFAULT_DIMS = (4, 5, 6, 7, 8, 9)

TABLE_COLUMNS = {
    "table1": ["necessary_condition"],
    "table2": ["j_minus", "k_minus", "k_plus", "a_I_plus", "a_S_minus"],
    "table3": ["G_nu_0", "F_nu_1", "Fprime_nu_0", "Gprime_nu_1"],
}


def parse_dims(spec: str) -> tuple[int, ...]:
    """Parse a dimension list: '4..9' (inclusive range), '4,6,8', or '5'."""
    spec = spec.strip()
    try:
        if ".." in spec:
            lo_s, hi_s = spec.split("..")
            lo, hi = int(lo_s), int(hi_s)
            if hi < lo:
                raise ValueError
            dims = tuple(range(lo, hi + 1))
        else:
            dims = tuple(int(tok) for tok in spec.split(","))
    except ValueError:
        raise ValueError(f"cannot parse dimension list {spec!r}; use '4..9' or '4,6'")
    if not dims:
        raise ValueError("dimension list is empty")
    return dims


class Enclosure(BaseModel):
    lo: float
    hi: float

    @classmethod
    def of(cls, dv: DirectedValue) -> "Enclosure":
        return cls(lo=dv.lo, hi=dv.hi)


class HealthResponse(BaseModel):
    status: str
    version: str


class ConstantsEntry(BaseModel):
    dimension: int
    j1: Enclosure
    j2: Enclosure
    k: Enclosure
    aI: Enclosure
    aS: Enclosure
    necessary_condition: Enclosure


class ConstantsResponse(BaseModel):
    entries: list[ConstantsEntry]


class TableRowModel(BaseModel):
    d: int
    values: dict[str, float]


class TableResponse(BaseModel):
    kind: str
    columns: list[str]
    rows: list[TableRowModel]


class CertifyRequest(BaseModel):
    dims: list[int] = Field(default=list(DEFAULT_DIMS), min_length=1)
    margin_guard: float = Field(default=MARGIN_GUARD, gt=0)
    enclosure_tol: float = Field(default=BISECT_TOL, gt=0)
    max_len: int = Field(default=64, ge=1)


class CertificateModel(BaseModel):
    dimension: int
    constants: dict[str, Enclosure]
    x_seq: list[float]
    y_seq: list[float]
    margins: dict[str, float]
    tolerances: dict[str, float]
    verdict: bool
    tool_version: str

    @classmethod
    def of(cls, cert: ZigzagCertificate, enclosure_tol: float) -> "CertificateModel":
        c = cert.constants
        return cls(
            dimension=cert.params.d,
            constants={
                "j1": Enclosure.of(c.j1),
                "j2": Enclosure.of(c.j2),
                "k": Enclosure.of(c.k),
                "aI": Enclosure.of(c.aI),
                "aS": Enclosure.of(c.aS),
            },
            x_seq=list(cert.x_seq),
            y_seq=list(cert.y_seq),
            margins=dict(sorted(cert.margins.items())),
            tolerances={"enclosure_tol": enclosure_tol, "margin_guard": cert.margin_guard},
            verdict=cert.verdict,
            tool_version=__version__,
        )


class CertifyResponse(BaseModel):
    certificates: list[CertificateModel]
    all_passed: bool


class MuCurveRequest(BaseModel):
    dimension: int = Field(ge=2)
    samples: int = Field(ge=2)
    enclosure_tol: float = Field(default=BISECT_TOL, gt=0)


class MuCurveResponse(BaseModel):
    dimension: int
    a: list[float]
    mu_lo: list[float]
    mu_hi: list[float]
    endpoint: Enclosure
    min_margin: float
    passed: bool


class FCurveRequest(BaseModel):
    dimension: int = Field(ge=2)
    samples: int = Field(ge=2)
    r_max: float | None = Field(default=None, gt=0)


class FCurveResponse(BaseModel):
    dimension: int
    r: list[float]
    f: list[float | None]
    f_prime: list[float | None]
    g: list[float | None]
    s: list[float | None]


class CompareAnnulusRequest(BaseModel):
    dimension: int = Field(ge=2)
    r_in: float = Field(gt=0)
    r_out: float = Field(default=1.0, gt=0)
    quadrature_n: int = Field(default=4096, ge=4)
    tolerance: float = Field(default=1e-6, gt=0)


class CompareAnnulusResponse(BaseModel):
    dimension: int
    r_in: float
    r_out: float
    max_violation: float
    kappa: float
    passed: bool


class PropSuiteRequest(BaseModel):
    seed: int = 0
    count: int = Field(default=1000, ge=1)
    p_values: list[int] = Field(default=[1, 2, 3], min_length=1)


class PropSuiteResponse(BaseModel):
    seed: int
    count: int
    p_values: list[int]
    split_failures: int
    coincidence_failures: int
    restriction_failures: int
    worst_discrepancy: float
    passed: bool


app = FastAPI(title="plateball", version=__version__)


@app.exception_handler(ValueError)
async def _usage_error(_: Request, exc: ValueError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc), "kind": "usage"})


@app.exception_handler(ArithmeticError)
async def _numerical_error(_: Request, exc: ArithmeticError) -> JSONResponse:
    return JSONResponse(
        status_code=500, content={"detail": str(exc), "kind": "numerical"}
    )


def _finite_or_none(x: float) -> float | None:
    return x if math.isfinite(x) else None


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.get("/constants", response_model=ConstantsResponse)
def constants(dims: str = "4..9") -> ConstantsResponse:
    entries = []
    for d in parse_dims(dims):
        params = DimensionParams(d)
        c = get_constants(params)
        nc = necessary_condition(params, c.j1, c.k)
        entries.append(
            ConstantsEntry(
                dimension=d,
                j1=Enclosure.of(c.j1),
                j2=Enclosure.of(c.j2),
                k=Enclosure.of(c.k),
                aI=Enclosure.of(c.aI),
                aS=Enclosure.of(c.aS),
                necessary_condition=Enclosure.of(nc),
            )
        )
    return ConstantsResponse(entries=entries)


@app.get("/tables/{kind}", response_model=TableResponse)
def tables(kind: str, dims: str = "4..9") -> TableResponse:
    if kind not in TABLE_COLUMNS:
        raise ValueError(f"unknown table {kind!r}; expected one of {sorted(TABLE_COLUMNS)}")
    rows = [
        TableRowModel(d=row.d, values=row.values)
        for row in reproduce_tables(list(parse_dims(dims)))
        if row.kind == kind
    ]
    return TableResponse(kind=kind, columns=TABLE_COLUMNS[kind], rows=rows)


@app.post("/certify", response_model=CertifyResponse)
def certify(req: CertifyRequest) -> CertifyResponse:
    certs = []
    for d in req.dims:
        if d < 4:
            raise ValueError(f"certification requires dimension >= 4, got {d}")
        constants_d = get_constants(DimensionParams(d), tol=req.enclosure_tol)
        cert = zigzag_search(constants_d, req.max_len, margin_guard=req.margin_guard)
        certs.append(CertificateModel.of(cert, req.enclosure_tol))
    return CertifyResponse(
        certificates=certs, all_passed=all(c.verdict for c in certs)
    )


@app.post("/curves/mu", response_model=MuCurveResponse)
def mu_curve(req: MuCurveRequest) -> MuCurveResponse:
    params = DimensionParams(req.dimension)
    grid = [i / (req.samples - 1) for i in range(req.samples)]
    values = [mu(params, a, tol=req.enclosure_tol) for a in grid]
    endpoint = mu(params, 0.0, tol=req.enclosure_tol)
    bound = endpoint.hi * (1.0 - 1e-6)
    min_margin = min(v.lo - bound for v in values)
    return MuCurveResponse(
        dimension=req.dimension,
        a=grid,
        mu_lo=[v.lo for v in values],
        mu_hi=[v.hi for v in values],
        endpoint=Enclosure.of(endpoint),
        min_margin=min_margin,
        passed=min_margin >= 0.0,
    )


@app.post("/curves/f", response_model=FCurveResponse)
def f_curve(req: FCurveRequest) -> FCurveResponse:
    params = DimensionParams(req.dimension)
    r_max = req.r_max
    if r_max is None:
        r_max = get_constants(params).k.lo
    grid = [r_max * i / req.samples for i in range(1, req.samples + 1)]
    f_vals, fp_vals, g_vals, s_vals = [], [], [], []
    for r in grid:
        fv, fpv, gv = f_nu(params, r), f_nu_prime(params, r), g_nu(params, r)
        f_vals.append(None if fv.is_pole else _finite_or_none(fv.value))
        fp_vals.append(None if fpv.is_pole else _finite_or_none(fpv.value))
        g_vals.append(None if gv.is_pole else _finite_or_none(gv.value))
        s_vals.append(_finite_or_none(s_nu(params, r)))
    return FCurveResponse(
        dimension=req.dimension, r=grid, f=f_vals, f_prime=fp_vals, g=g_vals, s=s_vals
    )


@app.post("/compare-annulus", response_model=CompareAnnulusResponse)
def compare_annulus(req: CompareAnnulusRequest) -> CompareAnnulusResponse:
    params = DimensionParams(req.dimension)
    max_violation, kappa = verify_comparison(
        params, req.r_in, req.r_out, quadrature_n=req.quadrature_n
    )
    return CompareAnnulusResponse(
        dimension=req.dimension,
        r_in=req.r_in,
        r_out=req.r_out,
        max_violation=max_violation,
        kappa=kappa,
        passed=max_violation <= req.tolerance,
    )


@app.post("/prop-suite", response_model=PropSuiteResponse)
def prop_suite(req: PropSuiteRequest) -> PropSuiteResponse:
    report = run_lemma_corpus(seed=req.seed, count=req.count, p_values=tuple(req.p_values))
    return PropSuiteResponse(
        seed=report.seed,
        count=report.count,
        p_values=list(report.p_values),
        split_failures=report.split_failures,
        coincidence_failures=report.coincidence_failures,
        restriction_failures=report.restriction_failures,
        worst_discrepancy=report.worst_discrepancy,
        passed=report.passed,
    )
