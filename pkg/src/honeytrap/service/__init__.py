"""HTTP face of the pipeline: request/response schemas and the app."""

from .app import app

__all__ = ["app"]
