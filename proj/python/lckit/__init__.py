"""Lane-change dataset, prediction and evaluation toolchain."""

try:
    from ._lckit import *  # noqa: F401,F403
    from ._lckit import __version__  # noqa: F401
except ImportError:  # in-tree test runs load the extension from the build dir
    from _lckit import *  # noqa: F401,F403
    from _lckit import __version__  # noqa: F401
