import os
import sys

# ctest points this at the package built in the CMake tree. An editable
# install registers an import hook that would otherwise shadow it.
_inplace = os.environ.get("FLCARBON_INPLACE_PKG")
if _inplace:
    sys.meta_path[:] = [f for f in sys.meta_path if type(f).__name__ != "ScikitBuildRedirectingFinder"]
    sys.path.insert(0, _inplace)
