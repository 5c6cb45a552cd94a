import sys

from seirs_control.cli import main

sys.exit(main())
