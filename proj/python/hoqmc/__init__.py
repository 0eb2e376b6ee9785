"""Higher-order QMC rules and estimators for affine-parametric diffusion."""

try:
    from ._hoqmc import *  # noqa: F401,F403
    from ._hoqmc import __version__  # noqa: F401
except ImportError:  # extension on sys.path rather than in the package
    from _hoqmc import *  # noqa: F401,F403
    from _hoqmc import __version__  # noqa: F401
