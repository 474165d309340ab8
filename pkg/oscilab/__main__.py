import sys

from .oscilab import main


sys.exit(main())
