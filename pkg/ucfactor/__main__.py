"""Allow ``python -m ucfactor``."""

import sys

from .app import main

sys.exit(main())
