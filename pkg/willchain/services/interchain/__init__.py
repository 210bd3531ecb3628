"""Destination chains, entrypoint contracts and the relayer set."""
