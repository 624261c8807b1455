"""Entry point for python -m boundseg.cli."""

import sys

from boundseg.cli.app import main

sys.exit(main())
