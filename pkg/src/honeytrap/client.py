"""Client for the pipeline service.

Without a base URL the client calls the service handlers in the same
process, so no server has to run for local work and results stay
byte-identical to the HTTP path (the service is stateless and
content-in/content-out).  With a base URL, requests go over HTTP.
"""

from __future__ import annotations

from typing import TypeVar

import httpx
from pydantic import BaseModel

from .errors import HoneytrapError
from .service import schemas
from .service.app import (
    handle_ablate,
    handle_evaluate,
    handle_extract,
    handle_health,
    handle_simulate,
    handle_train,
)

R = TypeVar("R", bound=BaseModel)


class RemoteInputError(HoneytrapError):
    """The server rejected the request as invalid input."""


class ServiceUnreachable(OSError):
    """The server could not be reached or failed on its side."""


_ROUTES: dict[str, tuple] = {
    "/simulate": (handle_simulate, schemas.SimulateResponse),
    "/extract": (handle_extract, schemas.ExtractResponse),
    "/train": (handle_train, schemas.TrainResponse),
    "/evaluate": (handle_evaluate, schemas.EvaluateResponse),
    "/ablate": (handle_ablate, schemas.AblateResponse),
}


class ServiceClient:
    """Talks to the pipeline service, in-process by default."""

    def __init__(self, base_url: str | None = None, timeout: float = 600.0):
        self.base_url = base_url.rstrip("/") if base_url else None
        self.timeout = timeout

    def _call(self, path: str, request: BaseModel, response_model: type[R]) -> R:
        if self.base_url is None:
            handler, _ = _ROUTES[path]
            return handler(request)
        try:
            response = httpx.post(
                f"{self.base_url}{path}",
                json=request.model_dump(mode="json"),
                timeout=self.timeout,
            )
        except httpx.HTTPError as exc:
            raise ServiceUnreachable(f"cannot reach {self.base_url}: {exc}") from exc
        if response.status_code in (400, 422):
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise RemoteInputError(f"the server rejected the request: {detail}")
        if response.status_code >= 500:
            raise ServiceUnreachable(f"server error {response.status_code}: {response.text}")
        response.raise_for_status()
        return response_model.model_validate(response.json())

    def health(self) -> schemas.HealthResponse:
        if self.base_url is None:
            return handle_health()
        try:
            response = httpx.get(f"{self.base_url}/health", timeout=self.timeout)
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise ServiceUnreachable(f"cannot reach {self.base_url}: {exc}") from exc
        return schemas.HealthResponse.model_validate(response.json())

    def simulate(self, request: schemas.SimulateRequest) -> schemas.SimulateResponse:
        return self._call("/simulate", request, schemas.SimulateResponse)

    def extract(self, request: schemas.ExtractRequest) -> schemas.ExtractResponse:
        return self._call("/extract", request, schemas.ExtractResponse)

    def train(self, request: schemas.TrainRequest) -> schemas.TrainResponse:
        return self._call("/train", request, schemas.TrainResponse)

    def evaluate(self, request: schemas.EvaluateRequest) -> schemas.EvaluateResponse:
        return self._call("/evaluate", request, schemas.EvaluateResponse)

    def ablate(self, request: schemas.AblateRequest) -> schemas.AblateResponse:
        return self._call("/ablate", request, schemas.AblateResponse)
