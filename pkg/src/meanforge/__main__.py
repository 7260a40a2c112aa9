import sys

from meanforge.cli import main

sys.exit(main())
