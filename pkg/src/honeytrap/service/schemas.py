"""Request and response bodies for the pipeline service.

The service is stateless and content-addressed: clients send file
*contents* (configuration text, profile records, dataset text) and get
file contents back, so the same payload always produces the same
response and all disk I/O stays on the client side.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..decorate import DecorateParams


class HealthResponse(BaseModel):
    status: str
    version: str


class DecorateParamsModel(BaseModel):
    """Ensemble construction knobs, mirroring the library defaults."""

    c_size: int = Field(default=15, ge=1)
    i_max: int = Field(default=50, ge=1)
    r_size: float = Field(default=1.0, gt=0)
    seed: int = 42
    min_leaf: int = Field(default=2, ge=1)

    def to_params(self) -> DecorateParams:
        params = DecorateParams(
            c_size=self.c_size,
            i_max=self.i_max,
            r_size=self.r_size,
            seed=self.seed,
            min_leaf=self.min_leaf,
        )
        params.validate()
        return params


class SimulateRequest(BaseModel):
    """Run the simulated trap deployment.

    ``config_text`` is the content of a configuration file (empty means
    the packaged default); ``seed`` overrides the configured seed.
    """

    config_text: str = ""
    seed: int | None = None


class SimSummary(BaseModel):
    n_profiles: int
    n_legitimate: int
    n_malicious: int
    n_events: int
    n_trapped: int
    n_harvested: int
    harvested_malicious: int
    harvested_legitimate: int
    honeypot_follow_rates: dict[int, float]


class SimulateResponse(BaseModel):
    profiles_jsonl: str
    harvested_jsonl: str
    events_csv: str
    config: dict[str, float | int]
    summary: SimSummary


class ExtractRequest(BaseModel):
    """Turn harvested profile records into a dataset."""

    profiles_jsonl: str
    group: str = "combined"
    relation: str = "profiles"


class ExtractResponse(BaseModel):
    arff_text: str
    csv_text: str
    n_instances: int
    n_attributes: int


class TrainRequest(BaseModel):
    """Train one ensemble on a dataset."""

    arff_text: str
    class_attribute: str = "class"
    params: DecorateParamsModel = DecorateParamsModel()


class TrainResponse(BaseModel):
    model_text: str
    n_members: int
    training_error: float
    error_history: list[float]
    schema_digest: str


class EvaluateRequest(BaseModel):
    """Cross-validate the learner on a dataset and report the battery."""

    arff_text: str
    class_attribute: str = "class"
    positive_class: str = "mal"
    folds: int = Field(default=10, ge=2)
    seed: int = 42
    jobs: int = Field(default=1, ge=1)
    params: DecorateParamsModel = DecorateParamsModel()
    cost_fp: float | None = Field(default=None, ge=0)
    cost_fn: float | None = Field(default=None, ge=0)


class CostResultModel(BaseModel):
    threshold: float
    total_cost: float
    accuracy: float
    confusion: list[list[int]]


class EvaluateResponse(BaseModel):
    report: dict
    report_text: str
    threshold_curve_csv: str
    margin_curve_csv: str
    cost: CostResultModel | None = None


class AblateRequest(BaseModel):
    """Cross-validate each feature group on the same fold partition."""

    arff_text: str
    class_attribute: str = "class"
    positive_class: str = "mal"
    folds: int = Field(default=10, ge=2)
    seed: int = 42
    jobs: int = Field(default=1, ge=1)
    params: DecorateParamsModel = DecorateParamsModel()


class AblationRowModel(BaseModel):
    group: str
    accuracy: float
    kappa: float
    recall: float
    fp_rate: float


class AblateResponse(BaseModel):
    rows: list[AblationRowModel]
    table_text: str
    csv_text: str
