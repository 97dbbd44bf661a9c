import sys

from cosigma.cli import main

sys.exit(main())
