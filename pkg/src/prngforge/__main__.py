import sys

from prngforge.cli import main

sys.exit(main())
