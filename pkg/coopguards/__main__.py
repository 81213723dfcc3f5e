"""Allow running with python -m coopguards."""

import sys

from coopguards.cli import main

sys.exit(main())
