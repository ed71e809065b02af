import sys

from scale_variations.cli import main

sys.exit(main())
