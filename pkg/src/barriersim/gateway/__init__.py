"""External surface: wire protocol, WebSocket server, and the CLI."""
from . import protocol
from .server import SimHost, create_app, serve

__all__ = ["protocol", "SimHost", "create_app", "serve"]
