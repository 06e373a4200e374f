import sys

from incsmooth.cli import main

sys.exit(main())
