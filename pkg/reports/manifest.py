"""
Run manifests: what a command was asked to do and what it wrote.
"""

from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional

from core.settings import VERSION
from .tables import write_json


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    command: str
    config: Dict = field(default_factory=dict)
    seeds: Dict[str, int] = field(default_factory=dict)
    version: str = VERSION
    started_at: str = field(default_factory=_now)
    finished_at: Optional[str] = None
    outputs: List[str] = field(default_factory=list)
    status: str = "running"
    error: Optional[str] = None

    def add_output(self, path) -> Path:
        path = Path(path)
        if str(path) not in self.outputs:
            self.outputs.append(str(path))
        return path

    def finish(self, error: Optional[BaseException] = None) -> None:
        self.finished_at = _now()
        if error is None:
            self.status = "ok"
        else:
            self.status = "failed"
            self.error = f"{type(error).__name__}: {error}"

    def as_dict(self) -> Dict:
        return {
            "command": self.command,
            "config": self.config,
            "seeds": self.seeds,
            "version": self.version,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "outputs": list(self.outputs),
            "status": self.status,
            "error": self.error,
        }

    def write(self, output_dir: Path) -> Path:
        return write_json(self.as_dict(), Path(output_dir) / f"manifest_{self.command}.json")
