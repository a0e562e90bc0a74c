"""styleloop: an adaptive writing engine with an evolving style profile."""

from .gateway import LlmGateway, MockProvider, ProviderProfile, TemplateId
from .model import (
    Document,
    Generation,
    Highlight,
    Polarity,
    Settings,
    StyleDescription,
    StyleProfile,
    default_style,
    validate_style_description,
)
from .workspace import Workspace

__version__ = "0.1.0"

__all__ = [
    "Document",
    "Generation",
    "Highlight",
    "LlmGateway",
    "MockProvider",
    "Polarity",
    "ProviderProfile",
    "Settings",
    "StyleDescription",
    "StyleProfile",
    "TemplateId",
    "Workspace",
    "default_style",
    "validate_style_description",
    "__version__",
]
