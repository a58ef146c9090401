from __future__ import annotations

import sys

from ovalis.cli import main

sys.exit(main())
