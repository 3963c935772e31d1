import sys

from atomcavity.cli import main

sys.exit(main())
