from .csv_writer import CsvWriter
from .text_writer import TextWriter

__all__ = ["CsvWriter", "TextWriter"]
