"""Box spaces of finite group quotients: homology covers, extensions and their Hilbert-space data."""
