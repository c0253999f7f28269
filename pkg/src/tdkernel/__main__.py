import sys

from tdkernel.cli import main

sys.exit(main())
