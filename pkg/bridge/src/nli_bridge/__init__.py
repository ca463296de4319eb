"""nli_bridge: serve entailment scores over line-delimited JSON."""

from .config import BridgeConfig, load_config
from .models import ToyOverlapModel, build_model

__version__ = "0.1.0"
