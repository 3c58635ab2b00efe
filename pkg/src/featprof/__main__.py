import sys

from featprof.cli import main

sys.exit(main())
