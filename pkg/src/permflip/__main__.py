import sys

from permflip.cli import main

sys.exit(main())
