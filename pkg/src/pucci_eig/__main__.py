import sys

from pucci_eig.cli import main

sys.exit(main())
