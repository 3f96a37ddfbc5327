import sys

from dirac1d.cli import main

sys.exit(main())
