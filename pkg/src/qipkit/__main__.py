import sys

from qipkit.cli import main

sys.exit(main())
