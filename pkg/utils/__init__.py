from .logger import logger
from .rng import StreamFactory

__all__ = ["logger", "StreamFactory"]
