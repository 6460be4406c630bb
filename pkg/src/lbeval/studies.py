"""The sine map and Duffing-Ueda case studies, and the validation procedure.

The procedure compares a system ``S``, an identified model ``G`` and an
extension ``H`` of ``G`` (same polynomial, different operation order):

1. RMSE and MAPE with ``y = S`` and ``yhat = G``.
2. The lower bound error from the pseudo-orbit pair ``(G, H)``, then LRMSE
   and LMAPE on the same ``y``/``yhat``.
3. All four indices again with ``y = G`` and ``yhat = H``, reusing the
   lower bound error from step 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from typing import Union

from .dsl import ModelFile, parse_model_file
from .expr import ModelDefinition
from .metrics import LbeSeries, ValidationReport, lbe, validation_report
from .sim import (DuffingParams, InputSignal, NO_INPUT, Orbit,
                  integrate_duffing, realize_input, simulate)

FIDELITY_MODES = ("equivalent", "paper-verbatim")
CHECKPOINT = 65


@dataclass(frozen=True)
class Forcing:
    amplitude: float = 10.0
    period: float = math.pi / 60

    def realize(self, N: int) -> InputSignal:
        return realize_input("cosine_forcing", N, amplitude=self.amplitude,
                             period=self.period)


@dataclass(frozen=True)
class CaseStudy:
    """A system/model/extension triple plus how to simulate it.

    ``system`` is either a model definition iterated like ``G`` and ``H``
    or Duffing ODE parameters, integrated and sampled every ``Ts``.
    """
    name: str
    system: Union[ModelDefinition, DuffingParams]
    model: ModelDefinition
    extension: ModelDefinition
    N: int = 100
    forcing: Forcing | None = None
    fidelity: str = "equivalent"

    def __post_init__(self):
        if self.fidelity not in FIDELITY_MODES:
            raise ValueError(f"fidelity must be one of {FIDELITY_MODES}")
        needs_input = any(isinstance(m, ModelDefinition) and m.requires_input
                          for m in (self.system, self.model, self.extension))
        if needs_input and self.forcing is None:
            raise ValueError(f"study {self.name!r}: a model reads u[] but no "
                             "forcing was given")
        if self.model.requires_input != self.extension.requires_input:
            raise ValueError(
                f"study {self.name!r}: model {self.model.name!r} and "
                f"extension {self.extension.name!r} disagree on whether they "
                "take an input")

    @property
    def system_lag(self) -> int:
        if isinstance(self.system, ModelDefinition):
            return self.system.max_output_lag
        return 0

    @property
    def k_start(self) -> int:
        """First validated sample; the seeded region is never scored."""
        return max(self.system_lag, self.model.max_output_lag,
                   self.extension.max_output_lag) + 1

    def parameters(self) -> dict:
        p = {
            "N": self.N,
            "fidelity": self.fidelity,
            "k_start": self.k_start,
            "system": (self.system.name
                       if isinstance(self.system, ModelDefinition)
                       else "duffing-ode"),
            "model": self.model.name,
            "extension": self.extension.name,
            "initial_conditions": {
                m.name: list(m.initial_conditions)
                for m in (self.system, self.model, self.extension)
                if isinstance(m, ModelDefinition)},
        }
        if self.forcing is not None:
            p["input"] = {"kind": "cosine_forcing",
                          "amplitude": self.forcing.amplitude,
                          "period": self.forcing.period}
        else:
            p["input"] = {"kind": "none"}
        if isinstance(self.system, DuffingParams):
            s = self.system
            p["duffing"] = {"k": s.k, "mu": s.mu, "A": s.A, "Ts": s.Ts,
                            "substeps": s.substeps, "integrator": "rk4"}
        return p


@dataclass(frozen=True)
class ProcedureOutput:
    study: CaseStudy
    system_orbit: Orbit
    model_orbit: Orbit
    extension_orbit: Orbit
    lbe: LbeSeries
    report_step1_2: ValidationReport
    report_step3: ValidationReport

    def summary(self) -> dict:
        out = {"parameters": self.study.parameters(),
               "difference_metric": "|modified - classical| / "
                                    "max(|modified|, |classical|) * 100"}
        for key, report in (("step1_2", self.report_step1_2),
                            ("step3", self.report_step3)):
            block = report.summary(checkpoints=(CHECKPOINT,))
            block.pop("difference_metric")
            block.pop("N")
            for n, tag in ((CHECKPOINT, str(CHECKPOINT)), (report.N, "N")):
                if n <= report.N:
                    block[f"d_rmse_pct@{tag}"] = report.d_rmse_pct[n]
                    block[f"d_mape_pct@{tag}"] = report.d_mape_pct[n]
            out[key] = block
        return out


def _system_orbit(study: CaseStudy, u: InputSignal) -> Orbit:
    if isinstance(study.system, DuffingParams):
        return integrate_duffing(study.system, study.N)
    return simulate(study.system, study.N,
                    u if study.system.requires_input else NO_INPUT)


def run_procedure(study: CaseStudy) -> ProcedureOutput:
    N = study.N
    u = study.forcing.realize(N) if study.forcing is not None else NO_INPUT
    system = _system_orbit(study, u)
    g = simulate(study.model, N, u if study.model.requires_input else NO_INPUT)
    h = simulate(study.extension, N,
                 u if study.extension.requires_input else NO_INPUT)
    delta = lbe(g, h)
    k_start = study.k_start
    names = study.parameters()
    step12 = validation_report(
        system, g, delta, k_start,
        {"y": names["system"], "yhat": names["model"],
         "delta": f"lbe({names['model']}, {names['extension']})"})
    step3 = validation_report(
        g, h, delta, k_start,
        {"y": names["model"], "yhat": names["extension"],
         "delta": f"lbe({names['model']}, {names['extension']})"})
    return ProcedureOutput(study, system, g, h, delta, step12, step3)


# shipped model files

def model_file_text(name: str) -> str:
    return resources.files("lbeval.models").joinpath(name).read_text(
        encoding="utf-8")


def shipped_models(name: str) -> ModelFile:
    return parse_model_file(model_file_text(name))


STUDY_FILES = {
    ("sine-map", "equivalent"): "sine.nmx",
    ("sine-map", "paper-verbatim"): "sine.nmx",
    ("duffing", "equivalent"): "duffing.nmx",
    ("duffing", "paper-verbatim"): "duffing_verbatim.nmx",
}
STUDY_NAMES = ("sine-map", "duffing")


def sine_map_study(N: int = 100, fidelity: str = "equivalent") -> CaseStudy:
    mf = shipped_models(STUDY_FILES["sine-map", fidelity])
    return CaseStudy("sine-map", mf["S"], mf["G"], mf["H"], N=N,
                     fidelity=fidelity)


def duffing_study(N: int = 100, fidelity: str = "equivalent",
                  substeps: int = 100) -> CaseStudy:
    mf = shipped_models(STUDY_FILES["duffing", fidelity])
    forcing = Forcing(10.0, math.pi / 60)
    params = DuffingParams(k=1.0, mu=0.25, A=forcing.amplitude,
                           Ts=forcing.period, substeps=substeps)
    return CaseStudy("duffing", params, mf["G"], mf["H"], N=N,
                     forcing=forcing, fidelity=fidelity)


def get_study(name: str, N: int = 100, fidelity: str = "equivalent",
              substeps: int = 100) -> CaseStudy:
    if name == "sine-map":
        return sine_map_study(N, fidelity)
    if name == "duffing":
        return duffing_study(N, fidelity, substeps)
    raise KeyError(f"unknown study {name!r}; valid: {', '.join(STUDY_NAMES)}")


def builtin_studies(N: int = 100, fidelity: str = "equivalent",
                    substeps: int = 100) -> list[CaseStudy]:
    return [sine_map_study(N, fidelity), duffing_study(N, fidelity, substeps)]
