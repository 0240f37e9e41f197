import sys

from hermineq.cli import main

sys.exit(main())
