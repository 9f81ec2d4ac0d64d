"""The pipeline service.

Every endpoint is a thin wrapper over a plain handler function, so the
bundled client can call the handlers in-process without a running
server.  Input problems surface as HTTP 422 with the error message in
``detail``.
"""

from __future__ import annotations

import dataclasses

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, arff, decorate, evaluation, features, simnet
from ..errors import EvaluationError, HoneytrapError
from . import schemas

app = FastAPI(
    title="honeytrap",
    description="Honeypot-driven spam-profile detection pipeline",
    version=__version__,
)


@app.exception_handler(HoneytrapError)
async def _invalid_input(request: Request, exc: HoneytrapError) -> JSONResponse:
    return JSONResponse(status_code=422, content={"detail": str(exc)})


def handle_health() -> schemas.HealthResponse:
    return schemas.HealthResponse(status="ok", version=__version__)


def handle_simulate(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
    text = req.config_text if req.config_text.strip() else simnet.default_config_text()
    config = simnet.parse_config(text)
    if req.seed is not None:
        config = dataclasses.replace(config, seed=req.seed)
        config.validate()
    profiles, events = simnet.run_simulation(config)
    harvested = simnet.harvest(
        profiles, events, config.harvest_cap, config.seed, config.control_fraction
    )
    rates = simnet.honeypot_stats(events, config.n_days, config.n_honeypots)
    n_malicious = sum(1 for p in profiles if p.truth_label is simnet.Label.MALICIOUS)
    summary = schemas.SimSummary(
        n_profiles=len(profiles),
        n_legitimate=len(profiles) - n_malicious,
        n_malicious=n_malicious,
        n_events=len(events),
        n_trapped=len({e.actor_id for e in events}),
        n_harvested=len(harvested),
        harvested_malicious=sum(
            1 for p in harvested if p.truth_label is simnet.Label.MALICIOUS
        ),
        harvested_legitimate=sum(
            1 for p in harvested if p.truth_label is simnet.Label.LEGITIMATE
        ),
        honeypot_follow_rates=rates,
    )
    return schemas.SimulateResponse(
        profiles_jsonl=simnet.profiles_to_jsonl(profiles),
        harvested_jsonl=simnet.profiles_to_jsonl(harvested),
        events_csv=simnet.events_to_csv(events),
        config=simnet.config_to_dict(config),
        summary=summary,
    )


def handle_extract(req: schemas.ExtractRequest) -> schemas.ExtractResponse:
    profiles = simnet.profiles_from_jsonl(req.profiles_jsonl)
    group = features.FeatureGroup.from_name(req.group)
    vectors = features.extract_all(profiles)
    dataset = features.vectors_to_dataset(vectors, group, relation=req.relation)
    return schemas.ExtractResponse(
        arff_text=arff.serialize(dataset),
        csv_text=features.vectors_to_csv(vectors),
        n_instances=dataset.n_instances,
        n_attributes=dataset.n_attributes,
    )


def _load_dataset(arff_text: str, class_attribute: str) -> arff.Dataset:
    dataset = arff.parse(arff_text)
    return arff.designate_class(dataset, class_attribute)


def handle_train(req: schemas.TrainRequest) -> schemas.TrainResponse:
    dataset = _load_dataset(req.arff_text, req.class_attribute)
    ensemble = decorate.train_decorate(dataset, req.params.to_params())
    return schemas.TrainResponse(
        model_text=decorate.save_model(ensemble),
        n_members=len(ensemble.members),
        training_error=ensemble.training_error,
        error_history=list(ensemble.error_history),
        schema_digest=ensemble.schema_hash,
    )


def handle_evaluate(req: schemas.EvaluateRequest) -> schemas.EvaluateResponse:
    dataset = _load_dataset(req.arff_text, req.class_attribute)
    params = req.params.to_params()
    predictions = evaluation.cv_predictions(
        dataset, params, folds=req.folds, seed=req.seed, jobs=req.jobs
    )
    labels = dataset.class_attribute.categories
    report = evaluation.build_report(predictions, labels, req.positive_class)

    cost_result = None
    if (req.cost_fp is None) != (req.cost_fn is None):
        raise EvaluationError("cost analysis needs both cost_fp and cost_fn")
    if req.cost_fp is not None:
        if len(labels) != 2:
            raise EvaluationError("cost analysis is defined for two-class datasets only")
        positive = labels.index(req.positive_class)
        negative = 1 - positive
        grid = [[0.0, 0.0], [0.0, 0.0]]
        grid[positive][negative] = req.cost_fn  # missed positive
        grid[negative][positive] = req.cost_fp  # false alarm
        matrix = evaluation.CostMatrix(tuple(tuple(row) for row in grid))
        outcome = evaluation.cost_benefit(predictions, positive, matrix, labels=labels)
        cost_result = schemas.CostResultModel(
            threshold=outcome.threshold,
            total_cost=outcome.total_cost,
            accuracy=outcome.accuracy,
            confusion=[list(row) for row in outcome.confusion.counts],
        )

    return schemas.EvaluateResponse(
        report=evaluation.report_to_dict(report),
        report_text=evaluation.format_report(report),
        threshold_curve_csv=evaluation.threshold_curve_csv(report.threshold_points),
        margin_curve_csv=evaluation.margin_curve_csv(report.margin_points),
        cost=cost_result,
    )


def handle_ablate(req: schemas.AblateRequest) -> schemas.AblateResponse:
    dataset = _load_dataset(req.arff_text, req.class_attribute)
    rows = evaluation.ablation(
        dataset,
        req.params.to_params(),
        folds=req.folds,
        seed=req.seed,
        positive_class=req.positive_class,
        jobs=req.jobs,
    )
    return schemas.AblateResponse(
        rows=[schemas.AblationRowModel(**dataclasses.asdict(r)) for r in rows],
        table_text=evaluation.format_ablation(rows),
        csv_text=evaluation.ablation_csv(rows),
    )


@app.get("/health", response_model=schemas.HealthResponse)
def health() -> schemas.HealthResponse:
    return handle_health()


@app.post("/simulate", response_model=schemas.SimulateResponse)
def simulate(req: schemas.SimulateRequest) -> schemas.SimulateResponse:
    return handle_simulate(req)


@app.post("/extract", response_model=schemas.ExtractResponse)
def extract(req: schemas.ExtractRequest) -> schemas.ExtractResponse:
    return handle_extract(req)


@app.post("/train", response_model=schemas.TrainResponse)
def train(req: schemas.TrainRequest) -> schemas.TrainResponse:
    return handle_train(req)


@app.post("/evaluate", response_model=schemas.EvaluateResponse)
def evaluate(req: schemas.EvaluateRequest) -> schemas.EvaluateResponse:
    return handle_evaluate(req)


@app.post("/ablate", response_model=schemas.AblateResponse)
def ablate(req: schemas.AblateRequest) -> schemas.AblateResponse:
    return handle_ablate(req)
