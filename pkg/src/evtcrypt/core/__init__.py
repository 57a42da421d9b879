# pyre-strict
"""Core components: event model, configuration and the encryptor."""
