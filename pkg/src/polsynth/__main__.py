import sys

from polsynth.cli import main

sys.exit(main())
