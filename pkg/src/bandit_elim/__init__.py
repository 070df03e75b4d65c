"""PAC best-arm identification by elimination."""
