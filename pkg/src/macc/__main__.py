import sys

from macc.cli import main

sys.exit(main())
