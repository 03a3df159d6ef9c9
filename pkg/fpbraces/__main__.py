import sys

from fpbraces.cli import main

sys.exit(main())
