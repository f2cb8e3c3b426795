"""HTTP service exposing sessions, turns, disambiguation, and admin endpoints."""

from askgraph.service.config import ServiceConfig, build_backend, load_config_file
from askgraph.service.app import create_app

__all__ = ["ServiceConfig", "build_backend", "load_config_file", "create_app"]
