"""Extended-precision numerical substrate."""
