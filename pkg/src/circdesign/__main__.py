import sys

from circdesign.cli import main

sys.exit(main())
