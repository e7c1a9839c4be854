import sys

from hyperproj.cli import main

sys.exit(main())
