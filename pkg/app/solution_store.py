from __future__ import annotations

import json
import os
from typing import Any, Dict, Optional


def _run_dir(base_dir: str, run_id: str) -> str:
    return os.path.join(base_dir, run_id)


def ensure_run_dirs(base_dir: str, run_id: str) -> Dict[str, str]:
    """
    Layout:
      data/runs/<run_id>/
        system.json    (input document as received, duplicate terms merged)
        solution.json  (solution document)
    """
    d = _run_dir(base_dir, run_id)
    os.makedirs(d, exist_ok=True)
    return {
        "run_dir": d,
        "system": os.path.join(d, "system.json"),
        "solution": os.path.join(d, "solution.json"),
    }


def write_json(path: str, payload: Any) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, ensure_ascii=False)


def read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def save_run(base_dir: str, run_id: str, system: Dict[str, Any], solution: Dict[str, Any]) -> None:
    paths = ensure_run_dirs(base_dir, run_id)
    write_json(paths["system"], system)
    write_json(paths["solution"], solution)


def _load(base_dir: str, run_id: str, key: str) -> Optional[Any]:
    path = os.path.join(_run_dir(base_dir, run_id), f"{key}.json")
    if not os.path.exists(path):
        return None
    return read_json(path)


def load_solution(base_dir: str, run_id: str) -> Optional[Dict[str, Any]]:
    return _load(base_dir, run_id, "solution")


def load_system(base_dir: str, run_id: str) -> Optional[Dict[str, Any]]:
    return _load(base_dir, run_id, "system")
