"""Run metadata embedded in every output: config hash, seed, resolution, commit and version."""
from __future__ import annotations

import hashlib
import json
import subprocess
from functools import lru_cache
from pathlib import Path
from typing import Optional, Union

PACKAGE_DIR = Path(__file__).resolve().parent


@lru_cache(maxsize=1)
def source_commit() -> Optional[str]:
	"""``HEAD`` of the checkout holding the package, ``None`` outside git."""
	try:
		result = subprocess.run(
			["git", "rev-parse", "--verify", "--quiet", "HEAD"],
			cwd=PACKAGE_DIR,
			capture_output=True,
			text=True,
		)
	except OSError:
		return None
	if result.returncode != 0:
		return None
	return result.stdout.strip() or None


def build_run_metadata(
	command: str,
	config_path: Optional[Union[str, Path]] = None,
	seed: Optional[int] = None,
	resolution: Optional[str] = None,
	params: Optional[dict] = None,
) -> dict:
	"""
	Everything needed to reproduce an output. Holds no timestamp, so the same
	config and seed give byte-identical files. A missing config hashes to ``None``.
	"""
	from twoweight import __version__

	config_hash = None
	if config_path is not None:
		try:
			config_hash = hashlib.sha256(Path(config_path).read_bytes()).hexdigest()
		except OSError:
			pass
	return {
		"command": command,
		"config_path": None if config_path is None else str(config_path),
		"config_sha256": config_hash,
		"seed": seed,
		"resolution": resolution,
		"params": dict(params or {}),
		"git_commit": source_commit(),
		"version": __version__,
	}


def metadata_lines(metadata: dict) -> list[str]:
	"""``key: value`` lines for CSV header comments; nested values as JSON."""
	lines = []
	for key, value in metadata.items():
		if isinstance(value, (dict, list)):
			value = json.dumps(value, sort_keys=True)
		lines.append(f"{key}: {value}")
	return lines

