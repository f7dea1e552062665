import sys

from qbailey.cli import main

sys.exit(main())
