"""Entanglement swapping with imperfect PDC sources and detectors."""

from ._swapsim import *  # noqa: F401,F403
from ._swapsim import oracle  # noqa: F401

__version__ = "0.1.0"


def reference_config():
    """The threshold-detector operating point shipped as configs/fig3.cfg."""
    cfg = parse_config_text(  # noqa: F405
        "\n".join(
            [
                "chi = 0.244949",
                "bell.eta.1 = 0.045",
                "bell.eta.2 = 0.045",
                "bell.eta.3 = 0.135",
                "bell.eta.4 = 0.135",
                "bell.pdc.1 = 3e-5",
                "bell.pdc.2 = 3e-5",
                "bell.pdc.3 = 1e-5",
                "bell.pdc.4 = 1e-5",
                "analysis.eta = 0.04",
                "analysis.pdc = 3e-5",
                "alpha = 45",
            ]
        )
    )
    return cfg
