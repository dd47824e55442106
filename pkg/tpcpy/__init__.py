from tpcpy.__version__ import __version__
