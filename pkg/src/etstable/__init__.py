"""Extended p-tempered alpha-stable distributions."""
