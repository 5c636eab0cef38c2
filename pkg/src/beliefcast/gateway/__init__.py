"""CLI, HTTP service, and workspace persistence."""

from .workspace import RunRecord, Workspace, execute_run, network_hash, new_run_id

__all__ = ["RunRecord", "Workspace", "execute_run", "network_hash", "new_run_id"]
