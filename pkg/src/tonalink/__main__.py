import sys

from tonalink.cli import main

sys.exit(main())
