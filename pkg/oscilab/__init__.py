from .oscilab import Oscilab, __description__, __version__, main


__all__ = ("Oscilab", "__description__", "__version__", "main")
