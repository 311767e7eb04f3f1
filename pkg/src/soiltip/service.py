"""Request/response models, handlers, and an HTTP app over the analysis core.

Each ``handle_*`` function takes a pydantic request and returns a pydantic
response; the command-line front end calls them in process, and
:func:`create_app` mounts the same handlers as POST endpoints.
"""

from __future__ import annotations

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator

from . import desing, geometry, tipping
from .forcing import ForcingKind
from .integrator import IntegratorConfig
from .soil_model import PARAM_KEYS, SoilParams, equilibrium, params_from_mapping


class ParamsModel(BaseModel):
    """Parameter overrides by file key; omitted keys keep their defaults."""

    values: dict[str, float | str] = Field(default_factory=dict)

    @field_validator("values")
    @classmethod
    def known_keys(cls, v):
        unknown = sorted(set(v) - set(PARAM_KEYS))
        if unknown:
            raise ValueError(f"unknown parameter keys: {', '.join(unknown)}")
        return v

    def build(self) -> SoilParams:
        return params_from_mapping(self.values)


class ToleranceModel(BaseModel):
    rel_tol: float = Field(1e-10, gt=0, le=1e-6)
    abs_tol: float = Field(1e-12, gt=0)

    def build(self, dense: bool = False) -> IntegratorConfig:
        return IntegratorConfig(self.rel_tol, self.abs_tol, dense=dense)


class SimulateRequest(BaseModel):
    scenario: Literal["fig2", "fig3", "fig4"]
    params: ParamsModel = Field(default_factory=ParamsModel)
    tstar_fig4: float = 35.0
    fig4_start: float = tipping.FIG4_START


class SimulateResponse(BaseModel):
    scenario: str
    summary: dict
    n_samples: int


class FrozenCanardRequest(BaseModel):
    Ta: float = 0.0
    T0: float = 0.0
    tol: float = Field(1e-10, gt=0)
    c_lo: float = 53.0
    c_hi: float = 55.5
    params: ParamsModel = Field(default_factory=ParamsModel)
    tolerances: ToleranceModel = Field(default_factory=ToleranceModel)


class FrozenCanardResponse(BaseModel):
    c_lo: float
    c_hi: float
    boundary: float
    iterations: int


class LayerRateRequest(BaseModel):
    Ta_max: float = 15.0
    tol: float = Field(1e-8, gt=0)
    r_lo: float = Field(1.0, gt=0)
    r_hi: float = Field(100.0, gt=0)
    params: ParamsModel = Field(default_factory=ParamsModel)


class LayerRateResponse(BaseModel):
    Ta_max: float
    r_c: float


class ManifoldRequest(BaseModel):
    Ta: Optional[float] = 0.0
    Ta_max: Optional[float] = None  # pulse branches over s when given
    n: int = Field(2001, ge=2)
    params: ParamsModel = Field(default_factory=ParamsModel)


class ManifoldResponse(BaseModel):
    axis: str
    rows: list[tuple[float, float, float, str, str]]
    folds: list[float]


class FoldedRequest(BaseModel):
    r: float = Field(gt=0)
    Ta_plus: float
    params: ParamsModel = Field(default_factory=ParamsModel)


class FoldedItem(BaseModel):
    T: float
    s: float
    kind: str
    eigenvalues: list[tuple[float, float]]


class FoldedResponse(BaseModel):
    r: float
    Ta_plus: float
    r_sn: Optional[float]
    items: list[FoldedItem]


class SingularDiagramRequest(BaseModel):
    Ta_plus: list[float] = Field(min_length=1)
    tol: float = Field(1e-6, gt=0)
    params: ParamsModel = Field(default_factory=ParamsModel)


class SingularDiagramResponse(BaseModel):
    rows: list[tuple[float, str, float]]
    degenerate: Optional[tuple[float, float]]
    failures: list[tuple[float, str, str]]


class DiagramRequest(BaseModel):
    forcing: Literal["tanh", "sech"]
    amplitudes: list[float] = Field(min_length=1)
    rates: list[float] = Field(min_length=1)
    jobs: int = Field(1, ge=1)
    params: ParamsModel = Field(default_factory=ParamsModel)
    tolerances: ToleranceModel = Field(default_factory=ToleranceModel)


class DiagramResponse(BaseModel):
    amplitudes: list[float]
    rates: list[float]
    classes: list[list[int]]
    failures: list[str]
    isolated_clusters: list[dict]


FAMILIES = {"tanh": ForcingKind.TANH_SHIFT, "sech": ForcingKind.SECH_PULSE}


def handle_simulate(req: SimulateRequest) -> tuple[SimulateResponse, tipping.ScenarioResult]:
    res = tipping.scenario_run(req.scenario, req.params.build(), tstar_fig4=req.tstar_fig4, fig4_start=req.fig4_start)
    summary = res.summary.__dict__.copy()
    return SimulateResponse(scenario=req.scenario, summary=summary, n_samples=len(res.trajectory.t)), res


def handle_frozen_canard(req: FrozenCanardRequest) -> FrozenCanardResponse:
    br = tipping.frozen_canard_search(req.Ta, req.T0, req.params.build(), req.tol, (req.c_lo, req.c_hi), req.tolerances.build())
    return FrozenCanardResponse(c_lo=br.lo, c_hi=br.hi, boundary=br.mid, iterations=br.iterations)


def handle_layer_rate(req: LayerRateRequest) -> LayerRateResponse:
    r = tipping.layer_critical_rate(req.Ta_max, req.params.build(), req.tol, (req.r_lo, req.r_hi))
    return LayerRateResponse(Ta_max=req.Ta_max, r_c=r)


def handle_manifold(req: ManifoldRequest) -> ManifoldResponse:
    p = req.params.build()
    if req.Ta_max is not None:
        bs = geometry.m_tilde_branches(req.Ta_max, p, np.linspace(-1.0, 1.0, req.n))
        C = equilibrium(0.0, p).C
        rows = [(float(a), float(T), float(c), lab, st) for a, T, c, lab, st in geometry.branch_rows(bs, C)]
        return ManifoldResponse(axis="s", rows=rows, folds=[float(T) for _, T in bs.folds])
    cm = geometry.critical_manifold(req.Ta, p, n=req.n)
    rows = [(float(a), float(T), float(c), str(lab), str(st)) for a, T, c, lab, st in geometry.manifold_rows(cm)]
    folds = [cm.T_F1] + ([cm.T_F2] if cm.T_F2 is not None else [])
    return ManifoldResponse(axis="Ta", rows=rows, folds=folds)


def handle_folded(req: FoldedRequest) -> tuple[FoldedResponse, list]:
    p = req.params.build()
    items = desing.folded_equilibria(req.r, req.Ta_plus, p)
    try:
        rsn = desing.r_sn(req.Ta_plus, p)
    except desing.NotFoundError:
        rsn = None
    out = [
        FoldedItem(T=fs.T, s=fs.s, kind=fs.kind.value, eigenvalues=[(complex(w).real, complex(w).imag) for w in fs.eigenvalues])
        for fs in items
    ]
    return FoldedResponse(r=req.r, Ta_plus=req.Ta_plus, r_sn=rsn, items=out), items


def handle_singular_diagram(req: SingularDiagramRequest) -> tuple[SingularDiagramResponse, desing.SingularDiagram]:
    d = desing.singular_diagram(req.Ta_plus, req.params.build(), tol=req.tol)
    resp = SingularDiagramResponse(rows=d.rows, degenerate=d.degenerate, failures=d.failures)
    return resp, d


def handle_diagram(req: DiagramRequest) -> tuple[DiagramResponse, tipping.TippingDiagram]:
    d = tipping.regular_diagram(
        FAMILIES[req.forcing], req.amplitudes, req.rates, req.params.build(), jobs=req.jobs, cfg=req.tolerances.build(dense=True)
    )
    resp = DiagramResponse(
        amplitudes=d.amplitudes.tolist(),
        rates=d.rates.tolist(),
        classes=d.classes.tolist(),
        failures=d.failures,
        isolated_clusters=d.isolated_clusters(),
    )
    return resp, d


def create_app():
    """FastAPI app exposing the handlers as JSON endpoints."""
    from fastapi import FastAPI, HTTPException

    from .integrator import BracketError, NumericalError
    from .soil_model import ParamError

    app = FastAPI(title="soiltip", version="0.1.0")

    def guarded(fn, req):
        try:
            return fn(req)
        except (ParamError, BracketError, ValueError) as e:
            raise HTTPException(status_code=422, detail=str(e)) from e
        except NumericalError as e:
            raise HTTPException(status_code=500, detail=str(e)) from e

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(req: SimulateRequest):
        return guarded(handle_simulate, req)[0]

    @app.post("/frozen-canard", response_model=FrozenCanardResponse)
    def frozen_canard(req: FrozenCanardRequest):
        return guarded(handle_frozen_canard, req)

    @app.post("/layer-rate", response_model=LayerRateResponse)
    def layer_rate(req: LayerRateRequest):
        return guarded(handle_layer_rate, req)

    @app.post("/manifold", response_model=ManifoldResponse)
    def manifold(req: ManifoldRequest):
        return guarded(handle_manifold, req)

    @app.post("/folded", response_model=FoldedResponse)
    def folded(req: FoldedRequest):
        return guarded(handle_folded, req)[0]

    @app.post("/singular-diagram", response_model=SingularDiagramResponse)
    def singular(req: SingularDiagramRequest):
        return guarded(handle_singular_diagram, req)[0]

    @app.post("/diagram", response_model=DiagramResponse)
    def diagram(req: DiagramRequest):
        return guarded(handle_diagram, req)[0]

    return app

