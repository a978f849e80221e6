import sys

from detcover.detcover_main import main

sys.exit(main())
