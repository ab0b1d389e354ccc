"""Python bindings for the hypersona toolkit's core operations."""

try:
    from ._hypersona import *  # noqa: F401,F403  (installed package layout)
    from ._hypersona import __version__  # noqa: F401
except ImportError:  # build-tree layout: the module sits next to this package
    from _hypersona import *  # noqa: F401,F403
    from _hypersona import __version__  # noqa: F401
