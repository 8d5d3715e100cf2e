"""Zero-sum stopping games on finite filtration trees.

Thin re-export of the compiled extension; see the project README for the
file formats and the CLI.
"""

try:
    from ._dynkin import *  # noqa: F401,F403  (installed package layout)
    from ._dynkin import __version__  # noqa: F401
except ImportError:  # in-tree builds put the extension on PYTHONPATH
    from _dynkin import *  # noqa: F401,F403
    from _dynkin import __version__  # noqa: F401
