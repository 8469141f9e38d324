import sys

from gtrmodel.cli import main

sys.exit(main())
