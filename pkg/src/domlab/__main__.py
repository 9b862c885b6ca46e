import sys

from domlab.cli import main

sys.exit(main())
