import json
import pathlib

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(1234))


@pytest.fixture
def random_states(rng):
    from src.utils.qstate import random_state

    def _factory(n: int):
        return [random_state(rng) for _ in range(n)]

    return _factory


@pytest.fixture
def rho_star():
    from src.utils.qstate import make_named

    return make_named("rho_star")


@pytest.fixture
def sigma_star():
    from src.utils.qstate import make_named

    return make_named("sigma_star")


@pytest.fixture
def spec_file(tmp_path):
    def _write(payload, name: str = "state.json") -> pathlib.Path:
        path = tmp_path / name
        text = payload if isinstance(payload, str) else json.dumps(payload)
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture
def tmp_env(monkeypatch, tmp_path):
    class _Env:
        def __init__(self, tmp_path: pathlib.Path):
            self.root = tmp_path
            self.path = tmp_path / ".env"

        def write(self, mapping: dict[str, str]):
            self.path.write_text(
                "\n".join(f"{k}={v}" for k, v in mapping.items()), encoding="utf-8"
            )

        def settings(self):
            from src.utils.config import Settings

            return Settings(_env_file=str(self.path))

    return _Env(tmp_path)
