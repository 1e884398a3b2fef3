import sys

from gomboc.cli import main

sys.exit(main())
