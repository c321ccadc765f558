"""Quantum information toolkit: state-vector and density-matrix simulation,
measurement, the three-qubit repetition code, entropy and compression, and
protocol simulations (BB84, E91, dense coding, teleportation, CHSH).

``BACKEND`` names the kernel implementation in use: ``"cython"`` when the
compiled extension is importable, ``"python"`` otherwise.
"""
from qipkit._kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
