import sys

from meslab.cli import main

sys.exit(main())
