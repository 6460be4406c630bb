"""Lower-bound-error-aware validation of recursive nonlinear models.

Models are written in a small text format (``.nmx``), iterated under strict
binary64 semantics, and compared with RMSE/MAPE and their LBE-inflated
counterparts LRMSE/LMAPE.
"""
__version__ = "0.1.0"

from .expr import (BinaryOp, Constant, DivergenceError, EvaluationContext,
                   EvaluationError, LaggedInput, LaggedOutput, ModelDefinition,
                   Neg, Pow, UnaryCall, evaluate, max_lags,
                   structurally_equal)
from .dsl import (ModelFile, ParseDiagnostic, ParseError, format_expression,
                  format_model, load_model_file, parse_expression,
                  parse_model_file)
from .sim import (DuffingParams, InputSignal, Orbit, cosine_forcing,
                  integrate_duffing, realize_input, simulate)
from .metrics import (IndexSeries, LbeSeries, UndefinedIndexError,
                      ValidationReport, difference_metric, lbe, lmape, lrmse,
                      mape, rmse, running_series, validation_report)
from .studies import (CaseStudy, ProcedureOutput, builtin_studies, get_study,
                      run_procedure)
