"""layoutforge: indoor layout generation toolkit.

Submodules:

- ``scene``     canonical data model + JSON wire forms
- ``geometry``  footprints, clipping, overlap areas, OOR, containment
- ``dataset``   ingestion, convention alignment, filtering, stats, splits
- ``prompts``   meta-prompt templates and completion/judge parsing
- ``gateway``   chat-completion backends (HTTP + deterministic mocks)
- ``forge``     preference-pair synthesis and the DPO reference loss
- ``evalkit``   validation, success rate, navigation, SVG rendering
- ``service``   HTTP session service
- ``cli``       command-line entry point
"""

from . import errors
from .errors import LayoutForgeError

__version__ = "0.1.0"

__all__ = ["errors", "LayoutForgeError", "__version__"]
