"""Service configuration, resolved from the environment with sane defaults."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .datasets import reference_dir
from .errors import SchemaError
from .gateway import KINDS, ProviderConfig

DEFAULT_LISTEN = "127.0.0.1:8787"
DEFAULT_K_RETRIEVE = 20


@dataclass(frozen=True)
class ServiceConfig:
    data_dir: Path = field(default_factory=reference_dir)
    cache_dir: Path = field(default_factory=lambda: Path.home() / ".cache" / "hollowcut")
    listen: str = DEFAULT_LISTEN
    offline: bool = False
    k_retrieve: int = DEFAULT_K_RETRIEVE
    providers: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.k_retrieve < 1:
            raise SchemaError("k_retrieve must be at least 1")
        object.__setattr__(self, "data_dir", Path(self.data_dir))
        object.__setattr__(self, "cache_dir", Path(self.cache_dir))
        providers = dict(self.providers)
        for kind in KINDS:
            providers.setdefault(kind, ProviderConfig.from_env(kind))
        if self.offline:
            providers = {
                k: ProviderConfig(
                    kind=c.kind,
                    endpoint=c.endpoint,
                    credential_ref=c.credential_ref,
                    timeout=c.timeout,
                    max_retries=c.max_retries,
                    cache_dir=c.cache_dir,
                    offline=True,
                )
                for k, c in providers.items()
            }
        object.__setattr__(self, "providers", providers)

    @classmethod
    def from_env(cls, env=os.environ, **overrides) -> "ServiceConfig":
        kw = {
            "data_dir": Path(env["HC_DATA_DIR"]) if env.get("HC_DATA_DIR") else reference_dir(),
            "cache_dir": Path(env["HC_CACHE_DIR"])
            if env.get("HC_CACHE_DIR")
            else Path.home() / ".cache" / "hollowcut",
            "listen": env.get("HC_LISTEN", DEFAULT_LISTEN),
            "offline": env.get("HC_OFFLINE", "") in ("1", "true", "yes"),
        }
        kw.update(overrides)
        return cls(**kw)

    def listen_host_port(self) -> tuple[str, int]:
        host, _, port = self.listen.rpartition(":")
        if not host or not port.isdigit():
            raise SchemaError(f"listen address must be host:port, got {self.listen!r}")
        return host, int(port)
