import sys

from fourier_nc.main import main

sys.exit(main())
