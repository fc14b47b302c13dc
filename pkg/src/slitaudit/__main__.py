import sys

from slitaudit.cli import main

sys.exit(main())
