"""stagecut: turn a static wide-angle stage recording plus viewer gaze into
a cinematically edited shot sequence."""

__version__ = "0.1.0"
