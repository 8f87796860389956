import sys

from pci.cli import main

sys.exit(main())
