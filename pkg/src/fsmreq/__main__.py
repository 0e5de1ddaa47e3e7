import sys

from fsmreq.cli import main

sys.exit(main())
