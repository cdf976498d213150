import sys

from dtckit.cli import main

sys.exit(main())
